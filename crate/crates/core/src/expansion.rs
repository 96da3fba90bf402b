//! Hamming distances to the cocycle and coboundary subgroups, exact expansion
//! constants, and the locality properties of nearest cocycles.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::cochain::{codifferential, cohomology_order, Cochain, CochainFile, FactorSolver, SparseMap};
use crate::complex::CellComplex;
use crate::error::{Error, Result};
use crate::group::{CoefficientGroup, Element};
use crate::metric::CofaceGraph;
use crate::search::{
    build_leader_table, check_table_size, min_weight_preimages, space_size, Accumulator, Budget, Limits, MapAccum,
    Pair, Preimages, QuotientAccum, SparseVec, Z2MapAccum,
};

/// Which subgroup distances are measured to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subgroup {
    Cocycles,
    Coboundaries,
}

/// Expansion variant: distance to cocycles or to coboundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Cocycle,
    Coboundary,
}

impl Variant {
    pub fn subgroup(self) -> Subgroup {
        match self {
            Variant::Cocycle => Subgroup::Cocycles,
            Variant::Coboundary => Subgroup::Coboundaries,
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cocycle" => Ok(Variant::Cocycle),
            "coboundary" => Ok(Variant::Coboundary),
            _ => Err(Error::BadParameters(format!("unknown variant {s:?}"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Cocycle => "cocycle",
            Variant::Coboundary => "coboundary",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    FullTable,
    BranchAndBound,
    CutEnumeration,
    SampledUpperBound,
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full-table" => Ok(Algorithm::FullTable),
            "branch-and-bound" => Ok(Algorithm::BranchAndBound),
            "cut-enumeration" => Ok(Algorithm::CutEnumeration),
            "sampled" | "sampled-upper-bound" => Ok(Algorithm::SampledUpperBound),
            _ => Err(Error::BadParameters(format!("unknown algorithm {s:?}"))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::FullTable => "full-table",
            Algorithm::BranchAndBound => "branch-and-bound",
            Algorithm::CutEnumeration => "cut-enumeration",
            Algorithm::SampledUpperBound => "sampled-upper-bound",
        })
    }
}

/// An exact nonnegative rational, or `+inf` when no cochain has positive distance.
/// Ordered with every finite value below `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Lambda {
    Finite(Ratio<u64>),
    Infinite,
}

impl Lambda {
    pub fn new(num: u64, den: u64) -> Self {
        Lambda::Finite(Ratio::new(num, den))
    }

    pub fn num_den(&self) -> Option<(u64, u64)> {
        match self {
            Lambda::Finite(r) => Some((*r.numer(), *r.denom())),
            Lambda::Infinite => None,
        }
    }

    /// `numerator >= lambda * distance`, exactly.
    pub fn bounds(&self, numerator: usize, distance: usize) -> bool {
        match self {
            Lambda::Finite(r) => {
                (numerator as u128) * (*r.denom() as u128) >= (*r.numer() as u128) * (distance as u128)
            }
            Lambda::Infinite => distance == 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Lambda::Finite(r) if *r.numer() == 0)
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lambda::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Lambda::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Lambda {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "inf" {
            return Ok(Lambda::Infinite);
        }
        let bad = || Error::BadParameters(format!("expected a rational like 2/3 or inf, got {s:?}"));
        let (n, d) = s.split_once('/').unwrap_or((s, "1"));
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        Ok(Lambda::new(n, d))
    }
}

impl Serialize for Lambda {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Lambda {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Nearest elements of a subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceResult {
    pub distance: usize,
    /// Nearest subgroup elements, sorted by support then values, at most `cap`.
    pub minimizers: Vec<Cochain>,
    /// Number of minimizers found before truncation.
    pub found: usize,
    /// `false` when `minimizers` is not the complete list.
    pub complete: bool,
    pub method: Algorithm,
}

const COLLECT_LIMIT: usize = 1 << 20;

fn group_accum(complex: &CellComplex, n: usize, group: &CoefficientGroup) -> Either<Z2MapAccum, MapAccum> {
    let map = SparseMap::codifferential(complex, n);
    if group.is_z2() {
        if let Some(a) = Z2MapAccum::new(map) {
            return Either::Left(a);
        }
    }
    Either::Right(MapAccum::new(map, group))
}

enum Either<L, R> {
    Left(L),
    Right(R),
}

/// Exact distance from `c` to the chosen subgroup of its degree.
pub fn subgroup_distance(
    complex: &CellComplex,
    c: &Cochain,
    subgroup: Subgroup,
    algo: Algorithm,
    limits: &Limits,
) -> Result<DistanceResult> {
    if !c.belongs_to(complex) {
        return Err(Error::ComplexMismatch);
    }
    let n = c.degree();
    let group = c.group().clone();
    if n > complex.dim() {
        return Err(Error::DegreeOutOfRange {
            degree: n,
            top: complex.dim(),
        });
    }
    if subgroup == Subgroup::Coboundaries && n == 0 {
        // B^0 is trivial
        return Ok(DistanceResult {
            distance: c.hamming_norm(),
            minimizers: vec![Cochain::zero(complex, 0, &group)],
            found: 1,
            complete: true,
            method: algo,
        });
    }
    // when B^n = Z^n the coboundary distance is the cocycle distance
    let local = subgroup == Subgroup::Cocycles || cohomology_order(complex, n, &group) == 1;
    let (weight, sols, complete) = if local {
        match group_accum(complex, n, &group) {
            Either::Left(a) => nearest(complex, c, &a, algo, local, limits)?,
            Either::Right(a) => nearest(complex, c, &a, algo, local, limits)?,
        }
    } else {
        let a = QuotientAccum::new(SparseMap::codifferential(complex, n - 1), &group);
        nearest(complex, c, &a, algo, false, limits)?
    };
    let mut zs: Vec<(Vec<usize>, Vec<u32>, Cochain)> = sols
        .into_iter()
        .map(|e| {
            let e = Cochain::from_values(complex, n, &group, e.pairs()).expect("cells in range");
            let z = c.sub(&e).expect("same complex");
            (z.support(), z.iter().map(|(_, v)| v.code()).collect(), z)
        })
        .collect();
    zs.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    let found = zs.len();
    let cap = limits.cap.max(1);
    Ok(DistanceResult {
        distance: weight,
        complete: complete && found <= cap,
        minimizers: zs.into_iter().take(cap).map(|t| t.2).collect(),
        found,
        method: algo,
    })
}

/// Minimum-weight `e` with `acc(e) == acc(c)`.
fn nearest<A: Accumulator>(
    complex: &CellComplex,
    c: &Cochain,
    acc: &A,
    algo: Algorithm,
    local: bool,
    limits: &Limits,
) -> Result<(usize, Vec<SparseVec>, bool)> {
    let n = c.degree();
    let group = c.group();
    let cells = complex.count(n);
    let target = acc.key_of(c.iter());
    let norm = c.hamming_norm();
    let all: Vec<usize> = (0..cells).collect();
    let found = |p: Preimages| match p {
        Preimages::Found {
            weight,
            solutions,
            complete,
        } => Some((weight, solutions, complete)),
        Preimages::None => None,
    };
    match algo {
        Algorithm::FullTable | Algorithm::CutEnumeration | Algorithm::SampledUpperBound => {
            check_table_size(group, cells, limits)?;
            let mut budget = Budget::new(u64::MAX);
            let p = min_weight_preimages(acc, group, &all, &target, 0, norm, COLLECT_LIMIT, &mut budget)
                .expect("unbounded budget");
            Ok(found(p).expect("c - c is a preimage"))
        }
        Algorithm::BranchAndBound => {
            let mut budget = Budget::new(limits.node_budget);
            let over = |_| Error::SearchBudgetExceeded {
                budget: limits.node_budget,
                best: norm,
            };
            if !local {
                let p = min_weight_preimages(acc, group, &all, &target, 0, norm, COLLECT_LIMIT, &mut budget)
                    .map_err(over)?;
                return Ok(found(p).expect("c - c is a preimage"));
            }
            let graph = CofaceGraph::new(complex, n, group);
            let seeds = c.support();
            let dist = graph.distances_from(&seeds);
            for w in 0..=norm {
                let ball: Vec<usize> = (0..cells).filter(|&t| dist[t].is_some_and(|d| d <= w)).collect();
                let p =
                    min_weight_preimages(acc, group, &ball, &target, w, w, COLLECT_LIMIT, &mut budget).map_err(over)?;
                if let Some(r) = found(p) {
                    return Ok(r);
                }
            }
            unreachable!("c - c has weight |c| and lies in the ball")
        }
    }
}

/// Exact expansion constant with witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpansionReport {
    pub complex: String,
    pub n: usize,
    pub coeff: CoefficientGroup,
    pub variant: Variant,
    pub lambda: Lambda,
    /// A cochain whose ratio `|d* c| / distance` equals `lambda` (absent for `inf`).
    pub witness: Option<CochainFile>,
    pub witness_norm: Option<usize>,
    pub witness_distance: Option<usize>,
    pub cosets_examined: u64,
    pub algorithm: Algorithm,
    /// `false` for sampled upper bounds.
    pub exact: bool,
    pub flags: Vec<String>,
    #[serde(skip)]
    pub runtime_ms: u128,
}

pub const CSV_HEADER: &str = "complex,n,coeff,variant,lambda_num,lambda_den,witness_support,algo,ms";

impl ExpansionReport {
    pub fn witness_cochain(&self, complex: &CellComplex) -> Result<Option<Cochain>> {
        self.witness
            .as_ref()
            .map(|w| Cochain::from_file(complex, w))
            .transpose()
    }

    pub fn csv_row(&self) -> String {
        let (num, den) = match self.lambda.num_den() {
            Some((n, d)) => (n.to_string(), d.to_string()),
            None => ("inf".to_string(), "1".to_string()),
        };
        let support = self
            .witness
            .as_ref()
            .map(|w| {
                w.values
                    .iter()
                    .map(|(c, _)| c.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            csv_field(&self.complex),
            self.n,
            self.coeff,
            self.variant,
            num,
            den,
            support,
            self.algorithm,
            self.runtime_ms
        )
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// The exact expansion constant of `complex` in degree `n`.
pub fn expansion_constant(
    complex: &CellComplex,
    n: usize,
    group: &CoefficientGroup,
    variant: Variant,
    limits: &Limits,
) -> Result<ExpansionReport> {
    let start = Instant::now();
    if n > complex.dim() {
        return Err(Error::DegreeOutOfRange {
            degree: n,
            top: complex.dim(),
        });
    }
    let cells = complex.count(n);
    let mut flags = Vec::new();
    let effective = if variant == Variant::Coboundary && n == 0 {
        flags.push("degree-0 coboundary variant measures distance to Z^0".to_string());
        Variant::Cocycle
    } else {
        variant
    };
    if let Err(Error::TableTooLarge { size_desc, limit }) = check_table_size(group, cells, limits) {
        return Err(Error::TableTooLarge {
            size_desc: format!("{size_desc} (shrink the complex or use the sampled upper-bound mode)"),
            limit,
        });
    }
    let image: u128 = FactorSolver::new(SparseMap::codifferential(complex, n), group)
        .image_orders()
        .iter()
        .map(|&o| o as u128)
        .product();
    let (best, cosets) = match effective {
        Variant::Cocycle => match group_accum(complex, n, group) {
            Either::Left(a) => table(&a, group, cells, image, limits)?,
            Either::Right(a) => table(&a, group, cells, image, limits)?,
        },
        Variant::Coboundary => {
            let quotient = QuotientAccum::new(SparseMap::codifferential(complex, n - 1), group);
            let classes = space_size(group, cells) / crate::cochain::coboundary_count(complex, n, group);
            match group_accum(complex, n, group) {
                Either::Left(a) => table(&Pair(quotient, a), group, cells, classes, limits)?,
                Either::Right(a) => table(&Pair(quotient, a), group, cells, classes, limits)?,
            }
        }
    };
    let (lambda, witness, norm, dist) = match best {
        Some((num, den, leader)) => {
            let w = Cochain::from_values(complex, n, group, leader.pairs())?;
            (
                Lambda::new(num as u64, den as u64),
                Some(w.to_file()),
                Some(num),
                Some(den),
            )
        }
        None => {
            flags.push("every cochain lies in the subgroup".to_string());
            (Lambda::Infinite, None, None, None)
        }
    };
    Ok(ExpansionReport {
        complex: complex.name().to_string(),
        n,
        coeff: group.clone(),
        variant,
        lambda,
        witness,
        witness_norm: norm,
        witness_distance: dist,
        cosets_examined: cosets,
        algorithm: Algorithm::FullTable,
        exact: true,
        flags,
        runtime_ms: start.elapsed().as_millis(),
    })
}

/// Edge lists for [`expansion_by_cuts`]: `Some` when every edge has two
/// distinct endpoints with odd coefficients, the graph is connected, and
/// there are at most 63 vertices.
fn simple_graph(complex: &CellComplex) -> Option<Vec<Vec<usize>>> {
    let v = complex.count(0);
    if !(2..=63).contains(&v) || complex.dim() == 0 {
        return None;
    }
    for e in 0..complex.count(1) {
        let f = complex.faces(1, e);
        if f.len() != 2 || f.iter().any(|(_, k)| k % 2 == 0) {
            return None;
        }
    }
    let graph = CofaceGraph::new(complex, 0, &CoefficientGroup::z2());
    if graph.components(&(0..v).collect::<Vec<_>>()).ok()?.len() != 1 {
        return None;
    }
    Some(
        (0..v)
            .map(|x| complex.cofaces(0, x).iter().map(|&(e, _)| e).collect())
            .collect(),
    )
}

/// Whether [`expansion_by_cuts`] applies.
pub fn cuts_applicable(complex: &CellComplex, n: usize, group: &CoefficientGroup) -> bool {
    n == 0 && group.is_z2() && simple_graph(complex).is_some()
}

fn mask_cells(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Exact degree-0 expansion over Z_2 of a connected graph by Gray-code
/// enumeration of vertex sets, one per coset of `Z^0 = {0, 1}`. Uses no table;
/// the witness is chosen by the same rule as the full table (minimal ratio,
/// then leader weight, then leader support).
pub fn expansion_by_cuts(
    complex: &CellComplex,
    group: &CoefficientGroup,
    variant: Variant,
    limits: &Limits,
) -> Result<ExpansionReport> {
    let start = Instant::now();
    let Some(cofaces) = simple_graph(complex) else {
        return Err(Error::BadParameters(
            "cut enumeration needs degree 0, Z_2 and a connected simple graph with at most 63 vertices".into(),
        ));
    };
    if !group.is_z2() {
        return Err(Error::CoefficientNotSupported(group.to_string()));
    }
    let v = cofaces.len();
    // the last vertex is never in S: each coset has exactly one such member
    let free = v - 1;
    let total: u64 = 1 << free;
    if total > limits.node_budget.max(limits.table_limit) {
        return Err(Error::TableTooLarge {
            size_desc: format!("2^{free} vertex sets"),
            limit: limits.node_budget.max(limits.table_limit),
        });
    }
    let edges = complex.count(1);
    let high = free.min(8);
    let low = free - high;

    // (cut, leader weight, leader mask)
    type Best = Option<(usize, usize, u64)>;
    let full: u64 = if v == 64 { u64::MAX } else { (1u64 << v) - 1 };
    let leader = |s: u64| -> (usize, u64) {
        let w = s.count_ones() as usize;
        let comp = full & !s;
        if 2 * w < v {
            (w, s)
        } else if 2 * w > v {
            (v - w, comp)
        } else if mask_cells(s) <= mask_cells(comp) {
            (w, s)
        } else {
            (w, comp)
        }
    };
    let better = |a: (usize, usize, u64), b: Best| -> bool {
        let Some(b) = b else { return true };
        let (lhs, rhs) = ((a.0 * b.1) as u128, (b.0 * a.1) as u128);
        lhs < rhs || (lhs == rhs && (a.1 < b.1 || (a.1 == b.1 && mask_cells(a.2) < mask_cells(b.2))))
    };
    let chunk = |h: u64| -> Best {
        let mut s: u64 = h << low;
        let mut parity = vec![false; edges];
        let mut cut = 0usize;
        for x in mask_cells(s) {
            for &e in &cofaces[x] {
                parity[e] = !parity[e];
                if parity[e] {
                    cut += 1;
                } else {
                    cut -= 1;
                }
            }
        }
        let mut best: Best = None;
        let consider = |s: u64, cut: usize, best: &mut Best| {
            if s == 0 {
                return;
            }
            let (w, m) = leader(s);
            // quick reject before building supports
            if let Some(b) = *best {
                if (cut * b.1) as u128 > (b.0 * w) as u128 {
                    return;
                }
            }
            if better((cut, w, m), *best) {
                *best = Some((cut, w, m));
            }
        };
        consider(s, cut, &mut best);
        for j in 1u64..(1u64 << low) {
            let x = j.trailing_zeros() as usize;
            s ^= 1 << x;
            for &e in &cofaces[x] {
                parity[e] = !parity[e];
                if parity[e] {
                    cut += 1;
                } else {
                    cut -= 1;
                }
            }
            consider(s, cut, &mut best);
        }
        best
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(limits.workers.max(1))
        .build()
        .map_err(|e| Error::BadParameters(e.to_string()))?;
    let chunks: Vec<u64> = (0..1u64 << high).collect();
    let results: Vec<Best> = if limits.workers <= 1 {
        chunks.into_iter().map(chunk).collect()
    } else {
        use rayon::prelude::*;
        pool.install(|| chunks.into_par_iter().map(chunk).collect())
    };
    let mut best: Best = None;
    for b in results.into_iter().flatten() {
        if better(b, best) {
            best = Some(b);
        }
    }
    let mut flags = Vec::new();
    if variant == Variant::Coboundary {
        flags.push("degree-0 coboundary variant measures distance to Z^0".to_string());
    }
    let (lambda, witness, norm, dist) = match best {
        Some((cut, w, m)) => {
            let c = Cochain::indicator(complex, 0, group, &mask_cells(m))?;
            (Lambda::new(cut as u64, w as u64), Some(c.to_file()), Some(cut), Some(w))
        }
        None => (Lambda::Infinite, None, None, None),
    };
    Ok(ExpansionReport {
        complex: complex.name().to_string(),
        n: 0,
        coeff: group.clone(),
        variant,
        lambda,
        witness,
        witness_norm: norm,
        witness_distance: dist,
        cosets_examined: total,
        algorithm: Algorithm::CutEnumeration,
        exact: true,
        flags,
        runtime_ms: start.elapsed().as_millis(),
    })
}

/// Full table when it fits, otherwise cut enumeration when it applies.
pub fn expansion_auto(
    complex: &CellComplex,
    n: usize,
    group: &CoefficientGroup,
    variant: Variant,
    limits: &Limits,
) -> Result<ExpansionReport> {
    match expansion_constant(complex, n, group, variant, limits) {
        Err(Error::TableTooLarge { .. }) if cuts_applicable(complex, n, group) => {
            expansion_by_cuts(complex, group, variant, limits)
        }
        other => other,
    }
}

/// `(numerator, distance, leader)` of the best coset.
type BestLeader = (usize, usize, SparseVec);

fn table<A: Accumulator>(
    acc: &A,
    group: &CoefficientGroup,
    cells: usize,
    classes: u128,
    limits: &Limits,
) -> Result<(Option<BestLeader>, u64)> {
    let t = build_leader_table(acc, group, cells, classes, limits)?;
    Ok((
        t.best.map(|b| (b.numerator, b.denominator, b.leader)),
        t.weights.len() as u64,
    ))
}

/// Certified upper bound on the expansion constant from explicit cochains:
/// single-cell indicators, coboundary-metric balls around each cell, and
/// `samples` random sparse cochains. Every ratio uses an exact distance.
pub fn sampled_upper_bound(
    complex: &CellComplex,
    n: usize,
    group: &CoefficientGroup,
    variant: Variant,
    samples: usize,
    seed: u64,
    limits: &Limits,
) -> Result<ExpansionReport> {
    let start = Instant::now();
    if n > complex.dim() {
        return Err(Error::DegreeOutOfRange {
            degree: n,
            top: complex.dim(),
        });
    }
    let cells = complex.count(n);
    let subgroup = if n == 0 { Subgroup::Cocycles } else { variant.subgroup() };
    let graph = CofaceGraph::new(complex, n, group);
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for cell in 0..cells {
        for r in 0..=2 {
            candidates.push(graph.neighbourhood(&[cell], r)?);
        }
    }
    candidates.sort();
    candidates.dedup();
    let mut cochains: Vec<Cochain> = candidates
        .iter()
        .map(|s| Cochain::indicator(complex, n, group, s))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        cochains.push(random_cochain(complex, n, group, 0.15, &mut rng));
    }
    let mut best: Option<(usize, usize, Cochain)> = None;
    let mut examined = 0u64;
    let mut skipped = 0usize;
    for c in cochains {
        let d = match subgroup_distance(complex, &c, subgroup, Algorithm::BranchAndBound, limits) {
            Ok(r) => r.distance,
            Err(Error::SearchBudgetExceeded { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        examined += 1;
        if d == 0 {
            continue;
        }
        let num = codifferential(complex, &c)?.hamming_norm();
        if best.as_ref().is_none_or(|(bn, bd, _)| num * bd < bn * d) {
            best = Some((num, d, c));
        }
    }
    let mut flags = vec!["upper bound only".to_string()];
    if skipped > 0 {
        flags.push(format!("{skipped} candidates skipped after exceeding the node budget"));
    }
    let (lambda, witness, norm, dist) = match best {
        Some((num, d, c)) => (Lambda::new(num as u64, d as u64), Some(c.to_file()), Some(num), Some(d)),
        None => (Lambda::Infinite, None, None, None),
    };
    Ok(ExpansionReport {
        complex: complex.name().to_string(),
        n,
        coeff: group.clone(),
        variant,
        lambda,
        witness,
        witness_norm: norm,
        witness_distance: dist,
        cosets_examined: examined,
        algorithm: Algorithm::SampledUpperBound,
        exact: false,
        flags,
        runtime_ms: start.elapsed().as_millis(),
    })
}

/// A random cochain: each cell is nonzero with probability `density`, with a
/// uniformly random nonzero value.
pub fn random_cochain<R: Rng>(
    complex: &CellComplex,
    n: usize,
    group: &CoefficientGroup,
    density: f64,
    rng: &mut R,
) -> Cochain {
    let q = group.order();
    let values: Vec<Element> = (0..complex.count(n))
        .map(|_| {
            if rng.gen_bool(density) {
                Element(rng.gen_range(1..q))
            } else {
                Element::ZERO
            }
        })
        .collect();
    Cochain::from_dense(complex, n, group, &values)
}

/// Locality checks for one minimizer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinimizerCheck {
    pub support: Vec<usize>,
    /// Every coboundary-connected component of `supp z` meets `supp c`.
    pub components_meet_support: bool,
    /// `supp z` lies in the distance-neighbourhood of `supp c`.
    pub within_neighbourhood: bool,
    /// Cells of `supp z` violating either property.
    pub offending: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalityReport {
    pub distance: usize,
    pub holds: bool,
    pub complete: bool,
    pub minimizers: Vec<MinimizerCheck>,
}

/// Checks both locality properties on every enumerated nearest cocycle of `c`.
pub fn locality_check(complex: &CellComplex, c: &Cochain, algo: Algorithm, limits: &Limits) -> Result<LocalityReport> {
    let dist = subgroup_distance(complex, c, Subgroup::Cocycles, algo, limits)?;
    let graph = CofaceGraph::new(complex, c.degree(), c.group());
    let supp_c = c.support();
    let ball = graph.neighbourhood(&supp_c, dist.distance)?;
    let mut checks = Vec::new();
    for z in &dist.minimizers {
        let supp_z = z.support();
        let mut offending = Vec::new();
        let mut meets = true;
        for comp in graph.components(&supp_z)? {
            if !comp.iter().any(|x| supp_c.binary_search(x).is_ok()) {
                meets = false;
                offending.extend(comp);
            }
        }
        let mut contained = true;
        for x in &supp_z {
            if ball.binary_search(x).is_err() {
                contained = false;
                offending.push(*x);
            }
        }
        offending.sort_unstable();
        offending.dedup();
        checks.push(MinimizerCheck {
            support: supp_z,
            components_meet_support: meets,
            within_neighbourhood: contained,
            offending,
        });
    }
    Ok(LocalityReport {
        distance: dist.distance,
        holds: checks
            .iter()
            .all(|m| m.components_meet_support && m.within_neighbourhood),
        complete: dist.complete,
        minimizers: checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, rp2, simplex_boundary};

    fn z2() -> CoefficientGroup {
        CoefficientGroup::z2()
    }

    #[test]
    fn distances_on_the_square() {
        let c4 = cycle(4).unwrap();
        let lim = Limits::default();
        for algo in [Algorithm::FullTable, Algorithm::BranchAndBound] {
            let c = Cochain::indicator(&c4, 0, &z2(), &[0]).unwrap();
            let r = subgroup_distance(&c4, &c, Subgroup::Cocycles, algo, &lim).unwrap();
            assert_eq!(r.distance, 1);
            assert_eq!(r.minimizers, vec![Cochain::zero(&c4, 0, &z2())]);
            let c = Cochain::indicator(&c4, 0, &z2(), &[0, 1]).unwrap();
            let r = subgroup_distance(&c4, &c, Subgroup::Cocycles, algo, &lim).unwrap();
            assert_eq!(r.distance, 2);
            assert_eq!(r.found, 2);
            let zero = Cochain::zero(&c4, 1, &z2());
            for s in [Subgroup::Cocycles, Subgroup::Coboundaries] {
                assert_eq!(subgroup_distance(&c4, &zero, s, algo, &lim).unwrap().distance, 0);
            }
        }
    }

    #[test]
    fn cycle_constants() {
        let lim = Limits::default();
        let r = expansion_constant(&cycle(4).unwrap(), 0, &z2(), Variant::Cocycle, &lim).unwrap();
        assert_eq!(r.lambda, Lambda::new(1, 1));
        assert_eq!(r.witness.unwrap().values.len(), 2);
        let r = expansion_constant(&cycle(6).unwrap(), 0, &z2(), Variant::Cocycle, &lim).unwrap();
        assert_eq!(r.lambda, Lambda::new(2, 3));
        let r = expansion_constant(&cycle(4).unwrap(), 1, &z2(), Variant::Coboundary, &lim).unwrap();
        assert!(r.lambda.is_zero());
        assert_eq!(r.witness.unwrap().values, vec![(0, vec![1])]);
    }

    #[test]
    fn top_degree_cocycle_variant_is_infinite() {
        let s2 = simplex_boundary(3).unwrap();
        let r = expansion_constant(&s2, 2, &z2(), Variant::Cocycle, &Limits::default()).unwrap();
        assert_eq!(r.lambda, Lambda::Infinite);
        assert!(r.witness.is_none());
    }

    #[test]
    fn projective_plane_has_cohomology() {
        let r = expansion_constant(&rp2(), 1, &z2(), Variant::Coboundary, &Limits::default()).unwrap();
        assert!(r.lambda.is_zero());
    }

    #[test]
    fn lambda_text_round_trip() {
        for s in ["2/3", "1/1", "0/1", "inf"] {
            assert_eq!(s.parse::<Lambda>().unwrap().to_string(), s);
        }
        assert_eq!("4/6".parse::<Lambda>().unwrap(), Lambda::new(2, 3));
        assert!(Lambda::new(2, 3).bounds(2, 3));
        assert!(!Lambda::new(2, 3).bounds(1, 3));
    }

    #[test]
    fn locality_on_a_cocycle_is_vacuous() {
        let s2 = simplex_boundary(3).unwrap();
        let c = Cochain::indicator(&s2, 2, &z2(), &[1]).unwrap();
        let r = locality_check(&s2, &c, Algorithm::FullTable, &Limits::default()).unwrap();
        assert_eq!(r.distance, 0);
        assert!(r.holds);
        assert_eq!(r.minimizers.len(), 1);
    }

    #[test]
    fn far_copy_is_never_touched() {
        let s2 = simplex_boundary(3).unwrap();
        let two = s2.disjoint_union(&s2, "two spheres").unwrap();
        let c = Cochain::indicator(&two, 1, &z2(), &[0, 1]).unwrap();
        let r = subgroup_distance(&two, &c, Subgroup::Cocycles, Algorithm::FullTable, &Limits::default()).unwrap();
        assert!(r.minimizers.iter().all(|z| z.support().iter().all(|&e| e < 6)));
        assert!(
            locality_check(&two, &c, Algorithm::FullTable, &Limits::default())
                .unwrap()
                .holds
        );
    }

    #[test]
    fn table_limit_is_reported() {
        let c8 = cycle(8).unwrap();
        let lim = Limits {
            table_limit: 16,
            ..Limits::default()
        };
        let err = expansion_constant(&c8, 0, &z2(), Variant::Cocycle, &lim).unwrap_err();
        assert_eq!(err.kind(), "TableTooLarge");
    }

    #[test]
    fn cut_enumeration_matches_the_table() {
        let lim = Limits::default();
        for m in [4, 5, 6, 9] {
            let c = cycle(m).unwrap();
            let a = expansion_constant(&c, 0, &z2(), Variant::Cocycle, &lim).unwrap();
            let b = expansion_by_cuts(&c, &z2(), Variant::Cocycle, &lim).unwrap();
            assert_eq!(a.lambda, b.lambda);
            assert_eq!(a.witness, b.witness);
        }
        let k7 = crate::generators::torus2();
        let r = expansion_by_cuts(&k7, &z2(), Variant::Cocycle, &lim).unwrap();
        assert_eq!(r.lambda, Lambda::new(4, 1));
        assert!(!cuts_applicable(&k7, 1, &z2()));
    }

    #[test]
    fn sampled_mode_bounds_the_exact_value() {
        let c8 = cycle(8).unwrap();
        let lim = Limits::default();
        let exact = expansion_constant(&c8, 0, &z2(), Variant::Cocycle, &lim).unwrap();
        let up = sampled_upper_bound(&c8, 0, &z2(), Variant::Cocycle, 20, 1, &lim).unwrap();
        assert!(!up.exact);
        let (en, ed) = exact.lambda.num_den().unwrap();
        let (un, ud) = up.lambda.num_den().unwrap();
        assert!(en * ud <= un * ed);
    }
}

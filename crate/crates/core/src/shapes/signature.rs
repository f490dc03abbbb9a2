//! Signatures of edge sets over a fixed vertex cover, their shapes, fair
//! costs, and enumeration of r-equivalence representatives.
//!
//! An edge set `F` is described by one vertex set per cover position,
//! `U_i = { w | {w, v_i} in F }`. Over a refined partition in which every
//! cover vertex is a singleton class, the shape of a signature counts, per
//! class `j` and per cover-position subset `I`, the vertices of `N_j` lying
//! in exactly the sets `U_i` with `i in I`.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use super::FairCost;
use crate::graph::{Graph, NdPartition, VertexCover};

#[derive(Debug, Error)]
pub enum SignatureError {
    #[error("edge ({0}, {1}) has no endpoint in the cover")]
    EdgeOutsideCover(usize, usize),
    #[error("({0}, {1}) is not an edge of the graph")]
    NotAnEdge(usize, usize),
    #[error("infeasible signature shape: {0}")]
    Infeasible(String),
    #[error("signature enumeration needs {needed} candidates, cap is {cap}")]
    TooLarge { needed: u128, cap: u64 },
    #[error("cover has {0} positions, at most 63 are supported")]
    CoverTooLarge(usize),
}

/// The signature of an edge set: one vertex set per cover position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub sets: Vec<BTreeSet<usize>>,
}

impl Signature {
    /// The edge set a signature describes.
    pub fn edges(&self, cover: &VertexCover) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for (i, set) in self.sets.iter().enumerate() {
            let vi = cover.vertices()[i];
            for &w in set {
                out.insert((w.min(vi), w.max(vi)));
            }
        }
        out
    }
}

/// Computes `U_i = { w | {w, v_i} in F }` for every cover position.
pub fn signature_of(
    g: &Graph,
    cover: &VertexCover,
    edges: &BTreeSet<(usize, usize)>,
) -> Result<Signature, SignatureError> {
    let mut sets = vec![BTreeSet::new(); cover.size()];
    for &(u, v) in edges {
        if g.edge_index(u, v).is_none() {
            return Err(SignatureError::NotAnEdge(u, v));
        }
        let mut covered = false;
        if let Some(i) = cover.position_of(u) {
            sets[i].insert(v);
            covered = true;
        }
        if let Some(i) = cover.position_of(v) {
            sets[i].insert(u);
            covered = true;
        }
        if !covered {
            return Err(SignatureError::EdgeOutsideCover(u, v));
        }
    }
    Ok(Signature { sets })
}

/// Cell counts of a signature over a refined partition: sparse map from
/// `(class, cover-position bitmask)` to a positive count. For every class
/// the cell counts sum to the class size.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SignatureShape {
    k: usize,
    cells: BTreeMap<(usize, u64), u32>,
}

impl SignatureShape {
    pub fn cover_size(&self) -> usize {
        self.k
    }

    pub fn cells(&self) -> &BTreeMap<(usize, u64), u32> {
        &self.cells
    }

    pub fn cell(&self, class: usize, mask: u64) -> u32 {
        self.cells.get(&(class, mask)).copied().unwrap_or(0)
    }

    fn insert(&mut self, class: usize, mask: u64, count: u32) {
        if count > 0 {
            *self.cells.entry((class, mask)).or_insert(0) += count;
        }
    }
}

/// The shape of a signature. `nd` must have every cover vertex as a
/// singleton class.
pub fn signature_shape(
    nd: &NdPartition,
    cover: &VertexCover,
    sig: &Signature,
) -> SignatureShape {
    let k = cover.size();
    let mut shape = SignatureShape { k, cells: BTreeMap::new() };
    for j in 0..nd.class_count() {
        for &w in nd.class(j) {
            let mut mask = 0u64;
            for (i, set) in sig.sets.iter().enumerate() {
                if set.contains(&w) {
                    mask |= 1 << i;
                }
            }
            shape.insert(j, mask, 1);
        }
    }
    shape
}

/// Classes that consist of exactly one cover vertex, as `Some(position)`.
fn cover_class_positions(nd: &NdPartition, cover: &VertexCover) -> Vec<Option<usize>> {
    (0..nd.class_count())
        .map(|j| {
            if nd.class_size(j) == 1 {
                cover.position_of(nd.class(j)[0])
            } else {
                None
            }
        })
        .collect()
}

fn feasible_positions(
    nd: &NdPartition,
    cover: &VertexCover,
    class: usize,
) -> u64 {
    let mut mask = 0u64;
    for (i, &vi) in cover.vertices().iter().enumerate() {
        let ci = nd.class_of(vi);
        if ci != class && nd.classes_adjacent(class, ci) {
            mask |= 1 << i;
        }
    }
    mask
}

fn validate(
    nd: &NdPartition,
    cover: &VertexCover,
    shape: &SignatureShape,
) -> Result<(), SignatureError> {
    if cover.size() > 63 {
        return Err(SignatureError::CoverTooLarge(cover.size()));
    }
    let cover_pos = cover_class_positions(nd, cover);
    for &vi in cover.vertices() {
        if nd.class_size(nd.class_of(vi)) != 1 {
            return Err(SignatureError::Infeasible(format!(
                "cover vertex {vi} is not a singleton class; refine the partition first"
            )));
        }
    }
    let mut sums = vec![0u64; nd.class_count()];
    for (&(j, mask), &count) in &shape.cells {
        sums[j] += count as u64;
        let feasible = feasible_positions(nd, cover, j);
        if mask & !feasible != 0 {
            return Err(SignatureError::Infeasible(format!(
                "cell ({j}, {mask:#b}) uses a cover position not adjacent to the class"
            )));
        }
        if let Some(m) = cover_pos[j] {
            if count > 1 {
                return Err(SignatureError::Infeasible(format!(
                    "cover singleton class {j} has cell count {count}"
                )));
            }
            if mask >> m & 1 == 1 {
                return Err(SignatureError::Infeasible(format!(
                    "cover class {j} lists its own position {m}"
                )));
            }
        }
    }
    for j in 0..nd.class_count() {
        if sums[j] != nd.class_size(j) as u64 {
            return Err(SignatureError::Infeasible(format!(
                "class {j} cells sum to {} but the class has {} vertices",
                sums[j],
                nd.class_size(j)
            )));
        }
    }
    // cover-cover symmetry: v_m in U_i iff v_i in U_m
    for (j, pos) in cover_pos.iter().enumerate() {
        let Some(m) = pos else { continue };
        let mask_m = shape
            .cells
            .iter()
            .find(|((cj, _), _)| cj == &j)
            .map(|((_, mask), _)| *mask)
            .unwrap_or(0);
        for i in 0..cover.size() {
            if mask_m >> i & 1 == 0 {
                continue;
            }
            let ji = nd.class_of(cover.vertices()[i]);
            let mask_i = shape
                .cells
                .iter()
                .find(|((cj, _), _)| cj == &ji)
                .map(|((_, mask), _)| *mask)
                .unwrap_or(0);
            if mask_i >> m & 1 == 0 {
                return Err(SignatureError::Infeasible(format!(
                    "cover symmetry broken between positions {m} and {i}"
                )));
            }
        }
    }
    Ok(())
}

/// Fair edge cost determined by a signature shape.
///
/// The deleted edges incident to cover vertex `v_i` number
/// `sum over cells whose mask contains i`; a non-cover vertex in cell
/// `(j, I)` is incident to `|I|` deleted edges.
pub fn fair_edge_cost_of_signature_shape(
    nd: &NdPartition,
    cover: &VertexCover,
    shape: &SignatureShape,
) -> Result<FairCost, SignatureError> {
    validate(nd, cover, shape)?;
    Ok(cost_unchecked(nd, cover, shape))
}

fn cost_unchecked(nd: &NdPartition, cover: &VertexCover, shape: &SignatureShape) -> FairCost {
    let cover_pos = cover_class_positions(nd, cover);
    let mut loads = vec![0u32; cover.size()];
    let mut worst_noncover = 0u32;
    for (&(j, mask), &count) in &shape.cells {
        for (i, load) in loads.iter_mut().enumerate() {
            if mask >> i & 1 == 1 {
                *load += count;
            }
        }
        if cover_pos[j].is_none() && count > 0 {
            worst_noncover = worst_noncover.max(mask.count_ones());
        }
    }
    FairCost(loads.into_iter().max().unwrap_or(0).max(worst_noncover))
}

/// Canonical realization: vertices of each class are assigned to that
/// class's cells in ascending vertex and mask order.
pub fn realize_signature(
    nd: &NdPartition,
    cover: &VertexCover,
    shape: &SignatureShape,
) -> Signature {
    let mut sets = vec![BTreeSet::new(); cover.size()];
    for j in 0..nd.class_count() {
        let members = nd.class(j);
        let mut next = 0usize;
        for (&(cj, mask), &count) in &shape.cells {
            if cj != j {
                continue;
            }
            for _ in 0..count {
                let w = members[next];
                next += 1;
                for (i, set) in sets.iter_mut().enumerate() {
                    if mask >> i & 1 == 1 {
                        set.insert(w);
                    }
                }
            }
        }
    }
    Signature { sets }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RepresentativeMode {
    /// Every signature shape enumerated exactly; the sweep is exhaustive.
    Exact,
    /// One representative per r-equivalence class; cells beyond `r` are
    /// realized by greedy water-filling, which approximates (and on every
    /// tested instance attains) the minimal cost within the class.
    Greedy,
}

/// The enumerated candidate signature shapes.
#[derive(Debug)]
pub struct SignatureCandidates {
    pub mode: RepresentativeMode,
    pub items: Vec<SignatureShape>,
}

/// Enumerates candidate signature shapes.
///
/// When the exact count of signature shapes stays within `exact_budget`,
/// all of them are enumerated (`Exact`). Otherwise one feasible
/// representative per r-equivalence class is produced (`Greedy`): per cell
/// an exact value `0..=r` or a "large" marker, larges realized at `r+1`
/// with the per-class remainder water-filled to minimize the maximum cover
/// load. Classes whose cell values cannot reach the class size are skipped
/// as unrealizable. `hard_cap` bounds the candidate list in either mode.
pub fn enumerate_signature_representatives(
    g: &Graph,
    nd: &NdPartition,
    cover: &VertexCover,
    r: u64,
    exact_budget: u64,
    hard_cap: u64,
) -> Result<SignatureCandidates, SignatureError> {
    let k = cover.size();
    if k > 63 {
        return Err(SignatureError::CoverTooLarge(k));
    }
    let cover_pos = cover_class_positions(nd, cover);
    // cover-cover adjacent pairs, each carrying one deletion bit
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..k {
        for m in (i + 1)..k {
            if g.adjacent(cover.vertices()[i], cover.vertices()[m]) {
                pairs.push((i, m));
            }
        }
    }
    if pairs.len() > 20 {
        return Err(SignatureError::TooLarge { needed: 1u128 << pairs.len(), cap: hard_cap });
    }
    let noncover: Vec<usize> =
        (0..nd.class_count()).filter(|&j| cover_pos[j].is_none()).collect();
    let masks_per_class: Vec<Vec<u64>> = noncover
        .iter()
        .map(|&j| {
            let feasible = feasible_positions(nd, cover, j);
            submasks(feasible)
        })
        .collect();

    let exact_total = exact_count(g, nd, cover, &pairs, &noncover, &masks_per_class);
    let mode = if exact_total <= exact_budget as u128 {
        RepresentativeMode::Exact
    } else {
        RepresentativeMode::Greedy
    };

    let mut items = Vec::new();
    let mut pair_bits = vec![false; pairs.len()];
    loop {
        // cover-class cells implied by the pair bits
        let mut cover_masks = vec![0u64; k];
        for (b, &(i, m)) in pairs.iter().enumerate() {
            if pair_bits[b] {
                cover_masks[i] |= 1 << m;
                cover_masks[m] |= 1 << i;
            }
        }
        let mut base = SignatureShape { k, cells: BTreeMap::new() };
        for (j, pos) in cover_pos.iter().enumerate() {
            if let Some(m) = pos {
                base.insert(j, cover_masks[*m], 1);
            }
        }
        match mode {
            RepresentativeMode::Exact => {
                emit_exact(nd, &noncover, &masks_per_class, 0, &base, &mut items, hard_cap)?
            }
            RepresentativeMode::Greedy => emit_greedy(
                nd,
                cover,
                &noncover,
                &masks_per_class,
                r,
                &base,
                &mut items,
                hard_cap,
            )?,
        }
        if !advance_bits(&mut pair_bits) {
            break;
        }
    }
    Ok(SignatureCandidates { mode, items })
}

fn submasks(feasible: u64) -> Vec<u64> {
    let mut out = vec![0u64];
    let mut sub = feasible;
    // enumerate submasks, then sort ascending
    while sub != 0 {
        out.push(sub);
        sub = (sub - 1) & feasible;
    }
    out.sort_unstable();
    out
}

fn advance_bits(bits: &mut [bool]) -> bool {
    for b in bits.iter_mut() {
        if *b {
            *b = false;
        } else {
            *b = true;
            return true;
        }
    }
    false
}

fn compositions_count(total: u64, cells: u64) -> u128 {
    // C(total + cells - 1, cells - 1), saturating
    let mut out: u128 = 1;
    let n = total as u128 + cells as u128 - 1;
    let k = (cells - 1) as u128;
    let k = k.min(n - k);
    for i in 0..k {
        out = out.saturating_mul(n - i) / (i + 1);
        if out > u128::MAX / 4 {
            return u128::MAX / 4;
        }
    }
    out
}

fn exact_count(
    _g: &Graph,
    nd: &NdPartition,
    _cover: &VertexCover,
    pairs: &[(usize, usize)],
    noncover: &[usize],
    masks_per_class: &[Vec<u64>],
) -> u128 {
    let mut total: u128 = 1u128 << pairs.len();
    for (idx, &j) in noncover.iter().enumerate() {
        let c = compositions_count(nd.class_size(j) as u64, masks_per_class[idx].len() as u64);
        total = total.saturating_mul(c);
        if total > u128::MAX / 4 {
            return u128::MAX / 4;
        }
    }
    total
}

fn emit_exact(
    nd: &NdPartition,
    noncover: &[usize],
    masks_per_class: &[Vec<u64>],
    depth: usize,
    partial: &SignatureShape,
    items: &mut Vec<SignatureShape>,
    hard_cap: u64,
) -> Result<(), SignatureError> {
    if depth == noncover.len() {
        if items.len() as u64 >= hard_cap {
            return Err(SignatureError::TooLarge { needed: hard_cap as u128 + 1, cap: hard_cap });
        }
        items.push(partial.clone());
        return Ok(());
    }
    let j = noncover[depth];
    let masks = &masks_per_class[depth];
    let size = nd.class_size(j) as u32;
    // all compositions of `size` over `masks`, in lexicographic cell order
    #[allow(clippy::too_many_arguments)]
    fn rec(
        nd: &NdPartition,
        noncover: &[usize],
        masks_per_class: &[Vec<u64>],
        depth: usize,
        j: usize,
        masks: &[u64],
        pos: usize,
        remaining: u32,
        partial: &mut SignatureShape,
        items: &mut Vec<SignatureShape>,
        hard_cap: u64,
    ) -> Result<(), SignatureError> {
        if pos + 1 == masks.len() {
            let mask = masks[pos];
            if remaining > 0 {
                partial.insert(j, mask, remaining);
            }
            emit_exact(nd, noncover, masks_per_class, depth + 1, partial, items, hard_cap)?;
            if remaining > 0 {
                partial.cells.remove(&(j, mask));
            }
            return Ok(());
        }
        for take in 0..=remaining {
            if take > 0 {
                partial.insert(j, masks[pos], take);
            }
            rec(
                nd,
                noncover,
                masks_per_class,
                depth,
                j,
                masks,
                pos + 1,
                remaining - take,
                partial,
                items,
                hard_cap,
            )?;
            if take > 0 {
                partial.cells.remove(&(j, masks[pos]));
            }
        }
        Ok(())
    }
    let mut partial = partial.clone();
    rec(
        nd,
        noncover,
        masks_per_class,
        depth,
        j,
        masks,
        0,
        size,
        &mut partial,
        items,
        hard_cap,
    )
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CellChoice {
    Exact(u32),
    Large,
}

#[allow(clippy::too_many_arguments)]
fn emit_greedy(
    nd: &NdPartition,
    cover: &VertexCover,
    noncover: &[usize],
    masks_per_class: &[Vec<u64>],
    r: u64,
    base: &SignatureShape,
    items: &mut Vec<SignatureShape>,
    hard_cap: u64,
) -> Result<(), SignatureError> {
    // per class, the list of candidate cell-value tuples
    let mut per_class: Vec<Vec<Vec<(u64, CellChoice)>>> = Vec::new();
    for (idx, &j) in noncover.iter().enumerate() {
        let size = nd.class_size(j) as u64;
        let masks = &masks_per_class[idx];
        let mut tuples = Vec::new();
        if size <= 2 * r + 2 {
            // small classes enumerate exactly
            collect_exact_tuples(masks, size as u32, &mut tuples);
        } else {
            collect_pattern_tuples(masks, size, r, &mut tuples);
        }
        per_class.push(tuples);
    }
    // odometer over classes
    let mut state = vec![0usize; per_class.len()];
    if per_class.iter().any(|t| t.is_empty()) {
        return Ok(());
    }
    loop {
        if items.len() as u64 >= hard_cap {
            return Err(SignatureError::TooLarge { needed: hard_cap as u128 + 1, cap: hard_cap });
        }
        let mut shape = base.clone();
        for (idx, &j) in noncover.iter().enumerate() {
            for &(mask, choice) in &per_class[idx][state[idx]] {
                match choice {
                    CellChoice::Exact(v) => {
                        if v > 0 {
                            shape.cells.insert((j, mask), v);
                        }
                    }
                    CellChoice::Large => {
                        shape.cells.insert((j, mask), (r + 1) as u32);
                    }
                }
            }
        }
        water_fill(nd, cover, noncover, &per_class, &state, r, &mut shape);
        items.push(shape);
        // advance
        let mut pos = state.len();
        let mut advanced = false;
        while pos > 0 {
            pos -= 1;
            state[pos] += 1;
            if state[pos] < per_class[pos].len() {
                advanced = true;
                break;
            }
            state[pos] = 0;
        }
        if !advanced {
            break;
        }
    }
    Ok(())
}

fn collect_exact_tuples(masks: &[u64], size: u32, out: &mut Vec<Vec<(u64, CellChoice)>>) {
    fn rec(
        masks: &[u64],
        pos: usize,
        remaining: u32,
        acc: &mut Vec<(u64, CellChoice)>,
        out: &mut Vec<Vec<(u64, CellChoice)>>,
    ) {
        if pos + 1 == masks.len() {
            acc.push((masks[pos], CellChoice::Exact(remaining)));
            out.push(acc.clone());
            acc.pop();
            return;
        }
        for take in 0..=remaining {
            acc.push((masks[pos], CellChoice::Exact(take)));
            rec(masks, pos + 1, remaining - take, acc, out);
            acc.pop();
        }
    }
    rec(masks, 0, size, &mut Vec::new(), out);
}

fn collect_pattern_tuples(masks: &[u64], size: u64, r: u64, out: &mut Vec<Vec<(u64, CellChoice)>>) {
    fn rec(
        masks: &[u64],
        pos: usize,
        size: u64,
        r: u64,
        exact_sum: u64,
        larges: u64,
        acc: &mut Vec<(u64, CellChoice)>,
        out: &mut Vec<Vec<(u64, CellChoice)>>,
    ) {
        if exact_sum + larges * (r + 1) > size {
            return; // unrealizable already
        }
        if pos == masks.len() {
            let realizable = if larges == 0 {
                exact_sum == size
            } else {
                exact_sum + larges * (r + 1) <= size
            };
            if realizable {
                out.push(acc.clone());
            }
            return;
        }
        for value in 0..=r {
            acc.push((masks[pos], CellChoice::Exact(value as u32)));
            rec(masks, pos + 1, size, r, exact_sum + value, larges, acc, out);
            acc.pop();
        }
        acc.push((masks[pos], CellChoice::Large));
        rec(masks, pos + 1, size, r, exact_sum, larges + 1, acc, out);
        acc.pop();
    }
    rec(masks, 0, size, r, 0, 0, &mut Vec::new(), out);
}

/// Distributes every class's remainder over its large cells, one unit at a
/// time, always into the cell that keeps the maximum cover load smallest
/// (ties broken by ascending cell mask).
fn water_fill(
    nd: &NdPartition,
    cover: &VertexCover,
    noncover: &[usize],
    per_class: &[Vec<Vec<(u64, CellChoice)>>],
    state: &[usize],
    _r: u64,
    shape: &mut SignatureShape,
) {
    let k = cover.size();
    let mut loads = vec![0u64; k];
    for (&(_, mask), &count) in &shape.cells {
        for (i, load) in loads.iter_mut().enumerate() {
            if mask >> i & 1 == 1 {
                *load += count as u64;
            }
        }
    }
    for (idx, &j) in noncover.iter().enumerate() {
        let tuple = &per_class[idx][state[idx]];
        let large_masks: Vec<u64> = tuple
            .iter()
            .filter(|(_, c)| *c == CellChoice::Large)
            .map(|(m, _)| *m)
            .collect();
        if large_masks.is_empty() {
            continue;
        }
        let assigned: u64 =
            tuple.iter().map(|&(m, _)| shape.cell(j, m) as u64).sum();
        let mut remainder = nd.class_size(j) as u64 - assigned;
        while remainder > 0 {
            let mut best: Option<(u64, u64)> = None; // (resulting max load, mask)
            for &mask in &large_masks {
                let new_max = loads
                    .iter()
                    .enumerate()
                    .map(|(i, &l)| if mask >> i & 1 == 1 { l + 1 } else { l })
                    .max()
                    .unwrap_or(0);
                if best.map_or(true, |(bm, _)| new_max < bm) {
                    best = Some((new_max, mask));
                }
            }
            let (_, mask) = best.expect("large cell available");
            *shape.cells.get_mut(&(j, mask)).unwrap() += 1;
            for (i, load) in loads.iter_mut().enumerate() {
                if mask >> i & 1 == 1 {
                    *load += 1;
                }
            }
            remainder -= 1;
        }
    }
}

/// r-equivalence of two signature shapes: every cell agrees exactly or is
/// greater than `r` on both sides.
pub fn signature_shapes_r_equivalent(a: &SignatureShape, b: &SignatureShape, r: u64) -> bool {
    let keys: BTreeSet<(usize, u64)> =
        a.cells.keys().chain(b.cells.keys()).copied().collect();
    keys.into_iter().all(|key| {
        let (x, y) = (a.cell(key.0, key.1) as u64, b.cell(key.0, key.1) as u64);
        x == y || (x > r && y > r)
    })
}

//! Exact equitable 3-coloring by backtracking.

use crate::graph::Graph;

/// Searches for a proper 3-coloring whose color-class sizes pairwise
/// differ by at most one (empty classes count). Returns one color per
/// vertex, or `None`.
pub fn equitable_3_coloring(g: &Graph) -> Option<Vec<u8>> {
    let n = g.vertex_count();
    let ceil = n.div_ceil(3);
    // high-degree vertices first fail fast
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(g.degree(v)));
    let mut colors = vec![u8::MAX; n];
    let mut counts = [0usize; 3];
    if assign(g, &order, 0, ceil, &mut colors, &mut counts) {
        Some(colors)
    } else {
        None
    }
}

fn assign(
    g: &Graph,
    order: &[usize],
    pos: usize,
    ceil: usize,
    colors: &mut Vec<u8>,
    counts: &mut [usize; 3],
) -> bool {
    if pos == order.len() {
        let max = counts.iter().max().unwrap();
        let min = counts.iter().min().unwrap();
        return max - min <= 1;
    }
    let v = order[pos];
    // colors are interchangeable, so only open one fresh class
    let first_unused = counts.iter().position(|&c| c == 0).unwrap_or(3);
    for color in 0..3u8 {
        if color as usize > first_unused {
            break;
        }
        if counts[color as usize] >= ceil {
            continue;
        }
        if g.neighbors(v).iter().any(|&u| colors[u] == color) {
            continue;
        }
        colors[v] = color;
        counts[color as usize] += 1;
        if assign(g, order, pos + 1, ceil, colors, counts) {
            return true;
        }
        counts[color as usize] -= 1;
        colors[v] = u8::MAX;
    }
    false
}

/// True iff `colors` is a proper coloring of `g` with at most 3 colors
/// whose class sizes pairwise differ by at most one.
pub fn is_equitable_3_coloring(g: &Graph, colors: &[u8]) -> bool {
    if colors.len() != g.vertex_count() || colors.iter().any(|&c| c >= 3) {
        return false;
    }
    if g.edges().iter().any(|&(u, v)| colors[u] == colors[v]) {
        return false;
    }
    let mut counts = [0usize; 3];
    for &c in colors {
        counts[c as usize] += 1;
    }
    counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1
}

//! Proper edge colouring of a bipartite multigraph with `max degree` colours
//! (König's line colouring theorem), by alternating-path recolouring.
//!
//! Disciplines are the left side, rooms the right side, each meeting an edge,
//! and colours are timeslots.

const NONE: usize = usize::MAX;

/// Colours `edges` so that no two edges sharing an endpoint get the same
/// colour. Returns `None` if some vertex has degree above `colors`.
pub(crate) fn color_bipartite(
    n_left: usize,
    n_right: usize,
    edges: &[(usize, usize)],
    colors: usize,
) -> Option<Vec<usize>> {
    let mut left_deg = vec![0usize; n_left];
    let mut right_deg = vec![0usize; n_right];
    for &(u, v) in edges {
        left_deg[u] += 1;
        right_deg[v] += 1;
    }
    if left_deg.iter().chain(&right_deg).any(|&d| d > colors) {
        return None;
    }

    let mut left_at = vec![NONE; n_left * colors];
    let mut right_at = vec![NONE; n_right * colors];
    let mut color = vec![NONE; edges.len()];

    for e in 0..edges.len() {
        let (u, v) = edges[e];
        let a = (0..colors).find(|&c| left_at[u * colors + c] == NONE)?;
        if right_at[v * colors + a] != NONE {
            let b = (0..colors).find(|&c| right_at[v * colors + c] == NONE)?;
            // Walk the a/b path from v and swap its colours; it cannot reach
            // u because u has no a-edge.
            let mut path = Vec::new();
            let mut node = v;
            let mut on_right = true;
            let mut want = a;
            loop {
                let slot = if on_right {
                    right_at[node * colors + want]
                } else {
                    left_at[node * colors + want]
                };
                if slot == NONE {
                    break;
                }
                path.push(slot);
                let (l, r) = edges[slot];
                node = if on_right { l } else { r };
                on_right = !on_right;
                want = if want == a { b } else { a };
            }
            for &p in &path {
                let (l, r) = edges[p];
                left_at[l * colors + color[p]] = NONE;
                right_at[r * colors + color[p]] = NONE;
            }
            for &p in &path {
                let (l, r) = edges[p];
                let c = if color[p] == a { b } else { a };
                color[p] = c;
                left_at[l * colors + c] = p;
                right_at[r * colors + c] = p;
            }
        }
        debug_assert_eq!(right_at[v * colors + a], NONE);
        color[e] = a;
        left_at[u * colors + a] = e;
        right_at[v * colors + a] = e;
    }
    Some(color)
}

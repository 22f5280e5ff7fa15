//! Second phase of the initial mapping: placing the k blocks of a partition
//! onto the k PEs.

use std::collections::VecDeque;

use super::bisection::split_into;
use crate::error::{Error, Result};
use crate::model::{Graph, NodeId, QuotientGraph, Weight};
use crate::rng::Rng;
use crate::topology::{HierarchySpec, PeDistance, PeId};

/// Block `i` goes to PE `i`.
pub fn identity_assignment(k: usize) -> Vec<PeId> {
    (0..k).collect()
}

/// Partitions the blocks along the hierarchy: first into `a_l` groups of
/// exactly `k / a_l` blocks each (one per top-level module), then each group
/// recursively. Returns `perm` with `perm[block] = PE`.
pub fn hierarchy_top_down(
    quotient: &QuotientGraph,
    spec: &HierarchySpec,
    rng: &mut Rng,
) -> Result<Vec<PeId>> {
    let k = spec.k();
    if quotient.k() != k {
        return Err(Error::InvalidParameter(format!(
            "quotient graph has {} blocks, the hierarchy has {k} PEs",
            quotient.k()
        )));
    }
    let model = quotient.to_graph();
    let h = spec.divisors();
    let mut perm = vec![0; k];
    let ids: Vec<NodeId> = (0..k).collect();
    place(&model, &ids, spec, &h, spec.levels() - 1, 0, rng, &mut perm);
    Ok(perm)
}

#[allow(clippy::too_many_arguments)]
fn place(
    sub: &Graph,
    ids: &[NodeId],
    spec: &HierarchySpec,
    h: &[usize],
    level: usize,
    offset: PeId,
    rng: &mut Rng,
    perm: &mut [PeId],
) {
    let arity = spec.arities()[level];
    // Unit node weights and a per-part capacity of exactly the group size
    // force perfectly equal groups.
    let groups = split_into(sub, arity, h[level] as Weight, 0.0, rng);
    debug_assert!({
        let mut count = vec![0; arity];
        groups.iter().for_each(|&g| count[g] += 1);
        count.iter().all(|&c| c == h[level])
    });
    for g in 0..arity {
        let local: Vec<NodeId> = (0..sub.n()).filter(|&v| groups[v] == g).collect();
        let first = offset + g * h[level];
        if level == 0 {
            for &v in &local {
                perm[ids[v]] = first;
            }
        } else {
            let child = sub.induced_subgraph(&local);
            let child_ids: Vec<NodeId> = local.iter().map(|&v| ids[v]).collect();
            place(&child, &child_ids, spec, h, level - 1, first, rng, perm);
        }
    }
}

/// Blocks reachable from `source` within `radius` hops, excluding `source`.
fn within_hops(quotient: &QuotientGraph, source: PeId, radius: usize, dist: &mut [usize]) -> Vec<PeId> {
    let mut reached = vec![source];
    let mut queue = VecDeque::from([source]);
    dist[source] = 0;
    while let Some(b) = queue.pop_front() {
        if dist[b] == radius {
            continue;
        }
        for &(c, _) in quotient.neighbors(b) {
            if dist[c] == usize::MAX {
                dist[c] = dist[b] + 1;
                reached.push(c);
                queue.push_back(c);
            }
        }
    }
    for &b in &reached {
        dist[b] = usize::MAX;
    }
    reached.swap_remove(0);
    reached
}

/// Change of the k-block objective when blocks `i` and `j` exchange PEs.
fn swap_delta<D: PeDistance>(quotient: &QuotientGraph, perm: &[PeId], oracle: &D, i: PeId, j: PeId) -> Weight {
    let (pi, pj) = (perm[i], perm[j]);
    let mut delta = 0;
    for &(x, w) in quotient.neighbors(i) {
        if x != j {
            delta += w * (oracle.distance(pj, perm[x]) - oracle.distance(pi, perm[x]));
        }
    }
    for &(x, w) in quotient.neighbors(j) {
        if x != i {
            delta += w * (oracle.distance(pi, perm[x]) - oracle.distance(pj, perm[x]));
        }
    }
    2 * delta
}

/// Local search over pairwise swaps of PE assignments, restricted to block
/// pairs at most `radius` hops apart in the quotient graph. Only strictly
/// improving swaps are applied; stops after a scan without improvement.
/// Returns the total decrease of the objective.
pub fn ncd_swap_refinement<D: PeDistance>(
    perm: &mut [PeId],
    quotient: &QuotientGraph,
    oracle: &D,
    radius: usize,
) -> Weight {
    let k = quotient.k();
    let mut dist = vec![usize::MAX; k];
    let mut total = 0;
    if radius == 0 {
        return 0;
    }
    loop {
        let mut improved = false;
        for i in 0..k {
            for j in within_hops(quotient, i, radius, &mut dist) {
                if j <= i {
                    continue;
                }
                let delta = swap_delta(quotient, perm, oracle, i, j);
                if delta < 0 {
                    perm.swap(i, j);
                    total -= delta;
                    improved = true;
                }
            }
        }
        if !improved {
            return total;
        }
    }
}

/// Greedy construction: repeatedly takes the unassigned block with the
/// largest communication to already placed blocks (initially: largest total
/// volume) and puts it on the free PE with the smallest distance sum to
/// already used PEs (initially: smallest total distance). Ties go to the
/// lowest id.
pub fn muller_merbach_greedy<D: PeDistance>(quotient: &QuotientGraph, oracle: &D) -> Vec<PeId> {
    let k = quotient.k();
    let mut perm = vec![usize::MAX; k];
    if k == 0 {
        return perm;
    }
    let volume: Vec<Weight> = (0..k)
        .map(|b| quotient.neighbors(b).iter().map(|&(_, w)| w).sum())
        .collect();
    let total_distance: Vec<Weight> = (0..k)
        .map(|p| (0..k).map(|q| oracle.distance(p, q)).sum())
        .collect();
    let mut comm = vec![0 as Weight; k];
    let mut dist_to_used = vec![0 as Weight; k];
    let mut pe_used = vec![false; k];

    let argmax = |score: &[Weight], free: &dyn Fn(usize) -> bool| {
        (0..k).filter(|&x| free(x)).fold(None, |best: Option<usize>, x| match best {
            Some(b) if score[b] >= score[x] => Some(b),
            _ => Some(x),
        })
    };
    let argmin = |score: &[Weight], free: &dyn Fn(usize) -> bool| {
        (0..k).filter(|&x| free(x)).fold(None, |best: Option<usize>, x| match best {
            Some(b) if score[b] <= score[x] => Some(b),
            _ => Some(x),
        })
    };

    for step in 0..k {
        let (block, pe) = if step == 0 {
            (
                argmax(&volume, &|_| true).unwrap(),
                argmin(&total_distance, &|_| true).unwrap(),
            )
        } else {
            (
                argmax(&comm, &|b| perm[b] == usize::MAX).unwrap(),
                argmin(&dist_to_used, &|p| !pe_used[p]).unwrap(),
            )
        };
        perm[block] = pe;
        pe_used[pe] = true;
        for &(c, w) in quotient.neighbors(block) {
            comm[c] += w;
        }
        for (p, d) in dist_to_used.iter_mut().enumerate() {
            *d += oracle.distance(p, pe);
        }
    }
    perm
}

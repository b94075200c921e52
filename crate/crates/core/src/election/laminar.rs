use fixedbitset::FixedBitSet;

use super::{Election, ElectionFrame, BroadcastOrder, is_consistent_with_order};

/// Whether the frame is laminar for its committee size.
///
/// A laminar frame is built from unanimous blocks by adding candidates
/// approved by every voter and by joining candidate-disjoint parts whose
/// seat shares match their voter shares exactly.
pub fn is_laminar(frame: &ElectionFrame) -> bool {
    let groups: Vec<(FixedBitSet, usize)> = frame.approvals().types().map(|(s, c)| (s.clone(), c)).collect();
    let free = frame.approvals().unused_candidates().len();
    matches!(laminar_need(&groups, frame.k()), Some(need) if need <= free)
}

/// Laminar, consistent with the order, and the order ranks candidates by
/// approval score (more popular candidates never come later).
pub fn is_broadcasted_laminar(e: &Election, order: &BroadcastOrder) -> bool {
    order.len() == e.m()
        && is_laminar(e.frame())
        && is_consistent_with_order(e, order)
        && respects_popularity(e.frame(), order)
}

pub fn respects_popularity(frame: &ElectionFrame, order: &BroadcastOrder) -> bool {
    let t = frame.approvals().tallies();
    order.ranking().windows(2).all(|w| t[w[0]] >= t[w[1]])
}

/// Number of candidates approved by nobody that a laminar decomposition of
/// `groups` with `k` seats needs, or `None` when there is no decomposition.
pub(crate) fn laminar_need(groups: &[(FixedBitSet, usize)], k: usize) -> Option<usize> {
    let first = &groups[0].0;
    if groups.iter().all(|(s, _)| s == first) {
        return Some(k.saturating_sub(first.count_ones(..)));
    }
    let mut common = first.clone();
    for (s, _) in &groups[1..] {
        common.intersect_with(s);
    }
    if let Some(c) = common.minimum() {
        if k == 0 {
            return None;
        }
        let reduced: Vec<(FixedBitSet, usize)> = groups
            .iter()
            .map(|(s, n)| {
                let mut s = s.clone();
                s.set(c, false);
                (s, *n)
            })
            .collect();
        return laminar_need(&reduced, k - 1);
    }
    let blocks = components(groups);
    if blocks.len() < 2 {
        return None;
    }
    let n: usize = groups.iter().map(|g| g.1).sum();
    let mut need = 0;
    for b in blocks {
        let part: Vec<(FixedBitSet, usize)> = b.iter().map(|&i| groups[i].clone()).collect();
        let nb: usize = part.iter().map(|g| g.1).sum();
        if !(k * nb).is_multiple_of(n) {
            return None;
        }
        need += laminar_need(&part, k * nb / n)?;
    }
    Some(need)
}

/// Indices of `groups` joined when their sets share a candidate. Groups
/// with empty sets form one block of their own.
pub(crate) fn components(groups: &[(FixedBitSet, usize)]) -> Vec<Vec<usize>> {
    let len = groups.len();
    let mut parent: Vec<usize> = (0..len).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let m = groups.iter().map(|g| g.0.len()).max().unwrap_or(0);
    let mut owner: Vec<Option<usize>> = vec![None; m];
    let mut empty: Option<usize> = None;
    for (i, (s, _)) in groups.iter().enumerate() {
        if s.is_clear() {
            match empty {
                Some(e) => {
                    let (a, b) = (find(&mut parent, e), find(&mut parent, i));
                    parent[b] = a;
                }
                None => empty = Some(i),
            }
        }
        for c in s.ones() {
            match owner[c] {
                Some(o) => {
                    let (a, b) = (find(&mut parent, o), find(&mut parent, i));
                    if a != b {
                        parent[b.max(a)] = a.min(b);
                    }
                }
                None => owner[c] = Some(i),
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut root_block: Vec<Option<usize>> = vec![None; len];
    for i in 0..len {
        let r = find(&mut parent, i);
        match root_block[r] {
            Some(b) => blocks[b].push(i),
            None => {
                root_block[r] = Some(blocks.len());
                blocks.push(vec![i]);
            }
        }
    }
    blocks
}

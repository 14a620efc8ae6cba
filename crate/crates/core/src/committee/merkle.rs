//! Append-only Merkle log with inclusion and prefix-consistency proofs.
//!
//! Hashing follows the RFC 6962 layout: leaves are `H(0x00 ‖ data)` and
//! interior nodes `H(0x01 ‖ left ‖ right)`. The root is kept in a frontier
//! of perfect-subtree peaks, so appends cost amortized O(1) hashes.

use super::types::{Digest, Hasher};

pub fn leaf_hash(data: &[u8]) -> Digest {
    let mut h = Hasher::new();
    h.u8(0x00).bytes(data);
    h.finish()
}

pub fn node_hash(left: &Digest, right: &Digest) -> Digest {
    let mut h = Hasher::new();
    h.u8(0x01).digest(left).digest(right);
    h.finish()
}

/// Root of the empty log.
pub fn empty_root() -> Digest {
    Digest::of(&[])
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MerkleLog {
    leaves: Vec<Digest>,
    /// Perfect subtree roots, largest first, with their heights.
    peaks: Vec<(Digest, u32)>,
}

impl MerkleLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> u64 {
        self.leaves.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn leaf(&self, index: u64) -> Option<Digest> {
        self.leaves.get(index as usize).copied()
    }

    /// Appends a leaf and returns the new root.
    pub fn append(&mut self, data: &[u8]) -> Digest {
        self.push_hash(leaf_hash(data));
        self.root()
    }

    fn push_hash(&mut self, leaf: Digest) {
        self.leaves.push(leaf);
        let mut node = (leaf, 0u32);
        while let Some(&(top, height)) = self.peaks.last() {
            if height != node.1 {
                break;
            }
            self.peaks.pop();
            node = (node_hash(&top, &node.0), height + 1);
        }
        self.peaks.push(node);
    }

    pub fn root(&self) -> Digest {
        let mut iter = self.peaks.iter().rev();
        match iter.next() {
            None => empty_root(),
            Some(&(last, _)) => iter.fold(last, |acc, (peak, _)| node_hash(peak, &acc)),
        }
    }

    /// Drops every leaf from `len` on.
    pub fn truncate(&mut self, len: u64) {
        if len >= self.len() {
            return;
        }
        let kept: Vec<Digest> = self.leaves[..len as usize].to_vec();
        self.leaves.clear();
        self.peaks.clear();
        for leaf in kept {
            self.push_hash(leaf);
        }
    }

    /// Root of the first `size` leaves.
    pub fn root_at(&self, size: u64) -> Option<Digest> {
        if size > self.len() {
            return None;
        }
        Some(if size == 0 { empty_root() } else { subtree_root(&self.leaves[..size as usize]) })
    }

    /// Audit path of leaf `index` in the tree of the first `size` leaves.
    pub fn inclusion_proof(&self, index: u64, size: u64) -> Option<Vec<Digest>> {
        if index >= size || size > self.len() {
            return None;
        }
        let mut out = Vec::new();
        path(index as usize, &self.leaves[..size as usize], &mut out);
        Some(out)
    }

    /// Proof that the tree of size `old` is a prefix of the tree of size `new`.
    pub fn consistency_proof(&self, old: u64, new: u64) -> Option<Vec<Digest>> {
        if old > new || new > self.len() {
            return None;
        }
        let mut out = Vec::new();
        if old > 0 && old < new {
            subproof(old as usize, &self.leaves[..new as usize], true, &mut out);
        }
        Some(out)
    }
}

fn split_point(n: usize) -> usize {
    debug_assert!(n > 1);
    1 << (usize::BITS - 1 - (n - 1).leading_zeros())
}

fn subtree_root(leaves: &[Digest]) -> Digest {
    match leaves.len() {
        0 => empty_root(),
        1 => leaves[0],
        n => {
            let k = split_point(n);
            node_hash(&subtree_root(&leaves[..k]), &subtree_root(&leaves[k..]))
        }
    }
}

fn path(m: usize, leaves: &[Digest], out: &mut Vec<Digest>) {
    let n = leaves.len();
    if n <= 1 {
        return;
    }
    let k = split_point(n);
    if m < k {
        path(m, &leaves[..k], out);
        out.push(subtree_root(&leaves[k..]));
    } else {
        path(m - k, &leaves[k..], out);
        out.push(subtree_root(&leaves[..k]));
    }
}

fn subproof(m: usize, leaves: &[Digest], complete: bool, out: &mut Vec<Digest>) {
    let n = leaves.len();
    if m == n {
        if !complete {
            out.push(subtree_root(leaves));
        }
        return;
    }
    let k = split_point(n);
    if m <= k {
        subproof(m, &leaves[..k], complete, out);
        out.push(subtree_root(&leaves[k..]));
    } else {
        subproof(m - k, &leaves[k..], false, out);
        out.push(subtree_root(&leaves[..k]));
    }
}

/// Checks that `leaf` sits at `index` in the tree of `size` leaves with `root`.
pub fn verify_inclusion(leaf: &Digest, index: u64, size: u64, proof: &[Digest], root: &Digest) -> bool {
    if index >= size {
        return false;
    }
    let (mut fnode, mut snode) = (index, size - 1);
    let mut r = *leaf;
    for p in proof {
        if snode == 0 {
            return false;
        }
        if fnode & 1 == 1 || fnode == snode {
            r = node_hash(p, &r);
            while fnode & 1 == 0 && fnode != 0 {
                fnode >>= 1;
                snode >>= 1;
            }
        } else {
            r = node_hash(&r, p);
        }
        fnode >>= 1;
        snode >>= 1;
    }
    snode == 0 && r == *root
}

/// Checks that `old_root` (size `old`) commits to a prefix of `new_root` (size `new`).
pub fn verify_consistency(old: u64, new: u64, old_root: &Digest, new_root: &Digest, proof: &[Digest]) -> bool {
    if old > new {
        return false;
    }
    if old == new {
        return proof.is_empty() && old_root == new_root;
    }
    if old == 0 {
        return proof.is_empty() && *old_root == empty_root();
    }
    let mut path: Vec<Digest> = Vec::with_capacity(proof.len() + 1);
    if old.is_power_of_two() {
        path.push(*old_root);
    }
    path.extend_from_slice(proof);
    let Some((first, rest)) = path.split_first() else {
        return false;
    };
    let (mut fnode, mut snode) = (old - 1, new - 1);
    while fnode & 1 == 1 {
        fnode >>= 1;
        snode >>= 1;
    }
    let (mut fr, mut sr) = (*first, *first);
    for c in rest {
        if snode == 0 {
            return false;
        }
        if fnode & 1 == 1 || fnode == snode {
            fr = node_hash(c, &fr);
            sr = node_hash(c, &sr);
            while fnode & 1 == 0 && fnode != 0 {
                fnode >>= 1;
                snode >>= 1;
            }
        } else {
            sr = node_hash(&sr, c);
        }
        fnode >>= 1;
        snode >>= 1;
    }
    fr == *old_root && sr == *new_root && snode == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log(n: usize) -> MerkleLog {
        let mut l = MerkleLog::new();
        for i in 0..n {
            l.append(&(i as u64).to_be_bytes());
        }
        l
    }

    #[test]
    fn single_leaf_root_is_leaf_hash() {
        let l = log(1);
        assert_eq!(l.root(), leaf_hash(&0u64.to_be_bytes()));
        assert_eq!(MerkleLog::new().root(), empty_root());
    }

    #[test]
    fn frontier_root_matches_recursive_definition() {
        let mut l = MerkleLog::new();
        for i in 0..70u64 {
            let r = l.append(&i.to_be_bytes());
            assert_eq!(r, l.root_at(i + 1).unwrap());
        }
    }

    #[test]
    fn three_leaf_shape() {
        let l = log(3);
        let lh: Vec<Digest> = (0..3u64).map(|i| leaf_hash(&i.to_be_bytes())).collect();
        assert_eq!(l.root(), node_hash(&node_hash(&lh[0], &lh[1]), &lh[2]));
    }

    #[test]
    fn proof_lengths() {
        let l = log(8);
        assert_eq!(l.inclusion_proof(3, 8).unwrap().len(), 3);
        assert_eq!(l.inclusion_proof(0, 1).unwrap().len(), 0);
        assert!(l.inclusion_proof(8, 8).is_none());
    }

    #[test]
    fn all_proofs_verify_and_bit_flips_fail() {
        let l = log(50);
        let root = l.root();
        for i in 0..50 {
            let leaf = l.leaf(i).unwrap();
            let proof = l.inclusion_proof(i, 50).unwrap();
            assert!(proof.len() <= 6);
            assert!(verify_inclusion(&leaf, i, 50, &proof, &root));
            assert!(!verify_inclusion(&leaf, (i + 1) % 50, 50, &proof, &root));
            for j in 0..proof.len() {
                let mut bad = proof.clone();
                bad[j].0[(i as usize) % 32] ^= 1;
                assert!(!verify_inclusion(&leaf, i, 50, &bad, &root));
            }
            let mut bad_leaf = leaf;
            bad_leaf.0[0] ^= 0x80;
            assert!(!verify_inclusion(&bad_leaf, i, 50, &proof, &root));
        }
    }

    #[test]
    fn consistency_between_all_prefixes() {
        let l = log(33);
        for old in 0..=33 {
            for new in old..=33 {
                let proof = l.consistency_proof(old, new).unwrap();
                let (ro, rn) = (l.root_at(old).unwrap(), l.root_at(new).unwrap());
                assert!(verify_consistency(old, new, &ro, &rn, &proof), "{old}->{new}");
                if old > 0 && old < new {
                    let mut wrong = rn;
                    wrong.0[5] ^= 1;
                    assert!(!verify_consistency(old, new, &ro, &wrong, &proof));
                    if !proof.is_empty() {
                        let mut bad = proof.clone();
                        bad[0].0[0] ^= 1;
                        assert!(!verify_consistency(old, new, &ro, &rn, &bad));
                    }
                }
            }
        }
    }

    #[test]
    fn diverging_logs_are_inconsistent() {
        let a = log(10);
        let mut b = log(6);
        b.append(b"fork");
        for i in 7..12u64 {
            b.append(&i.to_be_bytes());
        }
        let proof = b.consistency_proof(10, 12).unwrap();
        assert!(!verify_consistency(10, 12, &a.root(), &b.root(), &proof));
    }

    #[test]
    fn truncate_restores_prefix_root() {
        let mut l = log(20);
        let r13 = l.root_at(13).unwrap();
        l.truncate(13);
        assert_eq!(l.len(), 13);
        assert_eq!(l.root(), r13);
        l.append(b"x");
        assert_eq!(l.len(), 14);
    }
}

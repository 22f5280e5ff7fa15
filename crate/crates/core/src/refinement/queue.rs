//! Integer-keyed max priority queue with last-in-first-out order among equal
//! keys.
//!
//! Buckets are kept sparse in an ordered map so that arbitrary gain ranges
//! cost nothing up front. Updates leave stale entries behind; they are
//! skipped lazily when they surface at the top of a bucket.

use std::collections::BTreeMap;

use crate::model::{NodeId, Weight};

#[derive(Clone, Debug, Default)]
pub struct BucketQueue {
    buckets: BTreeMap<Weight, Vec<NodeId>>,
    key: Vec<Weight>,
    present: Vec<bool>,
    touched: Vec<NodeId>,
    len: usize,
}

impl BucketQueue {
    pub fn new(n: usize) -> Self {
        Self {
            buckets: BTreeMap::new(),
            key: vec![0; n],
            present: vec![false; n],
            touched: Vec::new(),
            len: 0,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, v: NodeId) -> bool {
        self.present[v]
    }

    pub fn key(&self, v: NodeId) -> Option<Weight> {
        self.present[v].then(|| self.key[v])
    }

    /// Inserts `v`, or changes its key if it is already queued.
    pub fn push(&mut self, v: NodeId, key: Weight) {
        if self.present[v] {
            if self.key[v] == key {
                return;
            }
        } else {
            self.present[v] = true;
            self.len += 1;
            self.touched.push(v);
        }
        self.key[v] = key;
        self.buckets.entry(key).or_default().push(v);
    }

    pub fn remove(&mut self, v: NodeId) {
        if self.present[v] {
            self.present[v] = false;
            self.len -= 1;
        }
    }

    /// Highest key and the most recently inserted node carrying it.
    pub fn peek_max(&mut self) -> Option<(NodeId, Weight)> {
        while let Some(mut entry) = self.buckets.last_entry() {
            let key = *entry.key();
            let bucket = entry.get_mut();
            while let Some(&v) = bucket.last() {
                if self.present[v] && self.key[v] == key {
                    return Some((v, key));
                }
                bucket.pop();
            }
            entry.remove();
        }
        None
    }

    pub fn pop_max(&mut self) -> Option<(NodeId, Weight)> {
        let (v, key) = self.peek_max()?;
        self.remove(v);
        Some((v, key))
    }

    /// Empties the queue in time proportional to the nodes touched since the
    /// last clear.
    pub fn clear(&mut self) {
        for &v in &self.touched {
            self.present[v] = false;
        }
        self.touched.clear();
        self.buckets.clear();
        self.len = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pops_by_key_then_lifo() {
        let mut q = BucketQueue::new(5);
        q.push(0, 3);
        q.push(1, 5);
        q.push(2, 3);
        q.push(3, -1);
        assert_eq!(q.len(), 4);
        assert_eq!(q.pop_max(), Some((1, 5)));
        assert_eq!(q.pop_max(), Some((2, 3)));
        assert_eq!(q.pop_max(), Some((0, 3)));
        assert_eq!(q.pop_max(), Some((3, -1)));
        assert_eq!(q.pop_max(), None);
    }

    #[test]
    fn updates_and_removals() {
        let mut q = BucketQueue::new(4);
        q.push(0, 1);
        q.push(1, 2);
        q.push(0, 7);
        q.remove(1);
        q.push(2, 7);
        q.push(0, 1);
        q.push(0, 7);
        assert_eq!(q.len(), 2);
        assert_eq!(q.pop_max(), Some((0, 7)));
        assert_eq!(q.pop_max(), Some((2, 7)));
        assert!(q.is_empty());
        assert_eq!(q.pop_max(), None);
    }

    #[test]
    fn clear_resets_membership() {
        let mut q = BucketQueue::new(3);
        q.push(0, 1);
        q.push(2, 4);
        q.clear();
        assert!(q.is_empty());
        assert!(!q.contains(2));
        q.push(1, 0);
        assert_eq!(q.pop_max(), Some((1, 0)));
    }
}

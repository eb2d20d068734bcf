//! Binary sum-tree over node weights: O(log n) updates and weighted draws.

/// Fixed-capacity sum-tree. Leaves hold per-node weights, internal nodes hold
/// subtree sums; the root is the total weight.
#[derive(Debug, Clone)]
pub struct SumTree {
    capacity: usize,
    tree: Vec<f64>,
}

impl SumTree {
    pub fn new(capacity: usize) -> Self {
        let capacity = capacity.max(1).next_power_of_two();
        Self {
            capacity,
            tree: vec![0.0; 2 * capacity - 1],
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn total(&self) -> f64 {
        self.tree[0]
    }

    pub fn get(&self, index: usize) -> f64 {
        self.tree[index + self.capacity - 1]
    }

    /// Set the weight at `index`, updating ancestor sums.
    pub fn set(&mut self, index: usize, weight: f64) {
        assert!(
            index < self.capacity,
            "index {index} out of capacity {}",
            self.capacity
        );
        let mut node = index + self.capacity - 1;
        let delta = weight - self.tree[node];
        self.tree[node] = weight;
        while node > 0 {
            node = (node - 1) / 2;
            self.tree[node] += delta;
        }
    }

    /// Index whose cumulative-weight interval contains `value` ∈ [0, total).
    ///
    /// Values at or above the total (possible through rounding) land in the
    /// last positively-weighted leaf.
    pub fn select(&self, value: f64) -> usize {
        let mut node = 0usize;
        let mut remaining = value;
        while node < self.capacity - 1 {
            let left = 2 * node + 1;
            let left_sum = self.tree[left];
            if remaining < left_sum {
                node = left;
            } else {
                remaining -= left_sum;
                node = left + 1;
            }
        }
        let mut index = node - (self.capacity - 1);
        // rounding guard: never return a zero-weight leaf
        while index > 0 && self.get(index) <= 0.0 {
            index -= 1;
        }
        index
    }
}

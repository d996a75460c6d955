//! Static k-d tree for k-nearest-neighbor distances within one point set.

const LEAF_SIZE: usize = 8;

enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

pub struct KdTree<'a> {
    dim: usize,
    data: &'a [f64],
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl<'a> KdTree<'a> {
    /// Builds over row-major `data` of dimension `dim`.
    pub fn new(dim: usize, data: &'a [f64]) -> Self {
        let n = data.len() / dim;
        let mut tree = KdTree {
            dim,
            data,
            order: (0..n).collect(),
            nodes: Vec::new(),
        };
        if n > 0 {
            tree.build(0, n);
        }
        tree
    }

    fn coord(&self, i: usize, axis: usize) -> f64 {
        self.data[i * self.dim + axis]
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        // split the widest coordinate at its median
        let axis = (0..self.dim)
            .map(|a| {
                let (lo, hi) = self.order[start..end].iter().fold(
                    (f64::INFINITY, f64::NEG_INFINITY),
                    |(lo, hi), &i| {
                        let v = self.coord(i, a);
                        (lo.min(v), hi.max(v))
                    },
                );
                (a, hi - lo)
            })
            .fold((0, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            })
            .0;
        let mid = start + (end - start) / 2;
        let (data, dim) = (self.data, self.dim);
        self.order[start..end].select_nth_unstable_by(mid - start, |&i, &j| {
            data[i * dim + axis]
                .total_cmp(&data[j * dim + axis])
                .then(i.cmp(&j))
        });
        let value = self.coord(self.order[mid], axis);
        self.nodes.push(Node::Leaf { start: 0, end: 0 });
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    /// Euclidean distance from point `i` to its `k`-th nearest other point.
    pub fn kth_distance(&self, i: usize, k: usize) -> f64 {
        let query = &self.data[i * self.dim..(i + 1) * self.dim];
        // ascending squared distances of the best k seen so far
        let mut best: Vec<f64> = Vec::with_capacity(k + 1);
        self.search(0, query, i, k, &mut best);
        best.get(k - 1).copied().unwrap_or(f64::INFINITY).sqrt()
    }

    fn search(&self, node: usize, query: &[f64], skip: usize, k: usize, best: &mut Vec<f64>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &j in &self.order[start..end] {
                    if j == skip {
                        continue;
                    }
                    let p = &self.data[j * self.dim..(j + 1) * self.dim];
                    let d2: f64 = query.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
                    if best.len() < k || d2 < best[k - 1] {
                        let at = best.partition_point(|&b| b <= d2);
                        best.insert(at, d2);
                        best.truncate(k);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = query[axis] - value;
                let (near, far) = if diff < 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.search(near, query, skip, k, best);
                if best.len() < k || diff * diff < best[k - 1] {
                    self.search(far, query, skip, k, best);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn brute(dim: usize, data: &[f64], i: usize, k: usize) -> f64 {
        let n = data.len() / dim;
        let mut d: Vec<f64> = (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                (0..dim)
                    .map(|a| (data[i * dim + a] - data[j * dim + a]).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        d.sort_by(f64::total_cmp);
        d[k - 1]
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = crate::random::seeded(4);
        for dim in 1..=4 {
            let data: Vec<f64> = (0..300 * dim)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let tree = KdTree::new(dim, &data);
            for i in (0..300).step_by(7) {
                for k in [1, 4, 9] {
                    assert_eq!(tree.kth_distance(i, k), brute(dim, &data, i, k));
                }
            }
        }
    }

    #[test]
    fn handles_repeated_coordinates() {
        let data = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0];
        let tree = KdTree::new(1, &data);
        assert_eq!(tree.kth_distance(0, 2), 0.0);
        assert_eq!(tree.kth_distance(0, 3), 1.0);
        assert_eq!(tree.kth_distance(11, 3), 1.0);
    }
}

//! k-means++ clustering of the dataset and the permutation that lays points
//! of the same cluster next to each other.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::kernel::Dataset;
use crate::perm::Permutation;
use crate::rng::rng_stream;

/// A cluster assignment plus the induced contiguous reordering.
#[derive(Debug, Clone)]
pub struct Clustering {
    assignment: Vec<usize>,
    perm: Permutation,
    boundaries: Vec<usize>,
}

impl Clustering {
    /// Cluster id of each point, indexed by original point index.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Permutation sorting points by cluster (`perm[new] = old`); stable by
    /// original index within a cluster.
    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }

    /// `c + 1` offsets into the permuted order; cluster `m` occupies
    /// `boundaries[m]..boundaries[m+1]`.
    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    pub fn n_clusters(&self) -> usize {
        self.boundaries.len() - 1
    }

    /// Builds a clustering from an explicit assignment (used by tests and by
    /// callers that want one block or per-point blocks without running
    /// k-means). Cluster ids must cover `0..c`.
    pub fn from_assignment(assignment: Vec<usize>, c: usize) -> Result<Self> {
        if c < 1 || assignment.is_empty() {
            return Err(Error::InvalidParameter(
                "need at least one cluster and one point".into(),
            ));
        }
        if assignment.iter().any(|&g| g >= c) {
            return Err(Error::InvalidParameter("cluster id out of range".into()));
        }
        let n = assignment.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (assignment[i], i));
        let mut boundaries = vec![0usize; c + 1];
        for &g in &assignment {
            boundaries[g + 1] += 1;
        }
        for m in 0..c {
            boundaries[m + 1] += boundaries[m];
        }
        Ok(Clustering {
            assignment,
            perm: Permutation::from_vec(order)?,
            boundaries,
        })
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Clusters the points into `c` groups with k-means++ seeding followed by
/// Lloyd iterations, run until the assignment reaches a fixpoint or 100
/// rounds. Clusters that empty out are re-seeded from the point farthest
/// from its current center.
pub fn kmeans_cluster(data: &Dataset, c: usize, seed: u64) -> Result<Clustering> {
    let n = data.n_points();
    let p = data.n_features();
    if c < 1 || c > n {
        return Err(Error::InvalidParameter(alloc::format!(
            "cluster count must lie in 1..={n}, got {c}"
        )));
    }
    let mut rng = rng_stream(seed, 0);

    // k-means++ seeding: first center uniform, then proportional to the
    // squared distance from the nearest chosen center.
    let mut centers: Vec<f64> = Vec::with_capacity(c * p);
    let first = rng.gen_range(0..n);
    centers.extend_from_slice(data.point(first));
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(data.point(i), data.point(first))).collect();
    while centers.len() / p < c {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            // all mass at the chosen centers (duplicated points): any index works
            rng.gen_range(0..n)
        };
        centers.extend_from_slice(data.point(pick));
        let ci = centers.len() / p - 1;
        for i in 0..n {
            let nd = sq_dist(data.point(i), &centers[ci * p..(ci + 1) * p]);
            if nd < d2[i] {
                d2[i] = nd;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for _round in 0..100 {
        // assignment step
        let mut changed = false;
        for i in 0..n {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for m in 0..c {
                let d = sq_dist(data.point(i), &centers[m * p..(m + 1) * p]);
                if d < best_d {
                    best_d = d;
                    best = m;
                }
            }
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        // update step
        let mut counts = vec![0usize; c];
        let mut sums = vec![0.0f64; c * p];
        for i in 0..n {
            let m = assignment[i];
            counts[m] += 1;
            for (f, &v) in data.point(i).iter().enumerate() {
                sums[m * p + f] += v;
            }
        }
        for m in 0..c {
            if counts[m] > 0 {
                for f in 0..p {
                    centers[m * p + f] = sums[m * p + f] / counts[m] as f64;
                }
            } else {
                // re-seed the empty cluster at the point farthest from its center
                let far = (0..n)
                    .max_by(|&i, &j| {
                        let di = sq_dist(data.point(i), &centers[assignment[i] * p..(assignment[i] + 1) * p]);
                        let dj = sq_dist(data.point(j), &centers[assignment[j] * p..(assignment[j] + 1) * p]);
                        di.partial_cmp(&dj).unwrap()
                    })
                    .unwrap();
                centers[m * p..(m + 1) * p].copy_from_slice(data.point(far));
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // re-number clusters that ended up empty out of existence
    let mut used = vec![false; c];
    for &g in &assignment {
        used[g] = true;
    }
    let mut remap = vec![0usize; c];
    let mut next = 0usize;
    for m in 0..c {
        if used[m] {
            remap[m] = next;
            next += 1;
        }
    }
    let assignment: Vec<usize> = assignment.into_iter().map(|g| remap[g]).collect();
    Clustering::from_assignment(assignment, next)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_data(n: usize) -> Dataset {
        let points: Vec<f64> = (0..n).flat_map(|i| [i as f64, (i * i % 7) as f64]).collect();
        let targets = vec![0.0; n];
        Dataset::new(n, 2, points, targets).unwrap()
    }

    #[test]
    fn one_cluster_per_point_has_zero_cost() {
        let data = grid_data(9);
        let cl = kmeans_cluster(&data, 9, 3).unwrap();
        assert_eq!(cl.n_clusters(), 9);
        // each block is a singleton
        for m in 0..9 {
            assert_eq!(cl.boundaries()[m + 1] - cl.boundaries()[m], 1);
        }
        // within-cluster cost is exactly zero: every point is its own center
        let mut seen = vec![false; 9];
        for &g in cl.assignment() {
            seen[g] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn single_cluster_is_one_block_in_original_order() {
        let data = grid_data(7);
        let cl = kmeans_cluster(&data, 1, 5).unwrap();
        assert_eq!(cl.n_clusters(), 1);
        assert_eq!(cl.boundaries(), &[0, 7]);
        // stability within a cluster keeps the original order
        assert_eq!(cl.permutation().as_slice(), &[0, 1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn separated_blobs_recover_the_optimal_two_partition() {
        // two tight blobs 100× their radius apart, 10 points each
        let mut points = Vec::new();
        let mut rng = crate::rng::rng_stream(17, 0);
        for i in 0..20 {
            let center = if i < 10 { 0.0 } else { 300.0 };
            for _ in 0..2 {
                points.push(center + crate::rng::standard_normal_vec(&mut rng, 1)[0]);
            }
        }
        let data = Dataset::new(20, 2, points, vec![0.0; 20]).unwrap();
        let cl = kmeans_cluster(&data, 2, 11).unwrap();

        // brute-force optimal 2-partition by within-cluster squared cost
        let mut best_mask = 0u32;
        let mut best_cost = f64::INFINITY;
        for mask in 1u32..(1 << 19) {
            // point 19 fixed to side 0 kills the mirror symmetry
            let mut cost = 0.0;
            for side in 0..2 {
                let members: Vec<usize> = (0..20)
                    .filter(|&i| ((mask >> i) & 1) as usize == side)
                    .collect();
                if members.is_empty() {
                    cost = f64::INFINITY;
                    break;
                }
                let mut center = [0.0f64; 2];
                for &i in &members {
                    center[0] += data.point(i)[0];
                    center[1] += data.point(i)[1];
                }
                center[0] /= members.len() as f64;
                center[1] /= members.len() as f64;
                for &i in &members {
                    cost += sq_dist(data.point(i), &center);
                }
            }
            if cost < best_cost {
                best_cost = cost;
                best_mask = mask;
            }
        }
        // compare partitions up to label swap
        let kmeans_side0: Vec<bool> = (0..20).map(|i| cl.assignment()[i] == cl.assignment()[0]).collect();
        let brute_side0: Vec<bool> = (0..20)
            .map(|i| ((best_mask >> i) & 1) == ((best_mask >> 0) & 1))
            .collect();
        assert_eq!(kmeans_side0, brute_side0);
        // and it matches the generating labels
        for i in 0..20 {
            assert_eq!(cl.assignment()[i] == cl.assignment()[0], i < 10);
        }
    }

    #[test]
    fn permutation_groups_clusters_contiguously() {
        let data = grid_data(30);
        let cl = kmeans_cluster(&data, 4, 23).unwrap();
        let perm = cl.permutation().as_slice();
        let mut last_cluster = 0;
        for (pos, &old) in perm.iter().enumerate() {
            let g = cl.assignment()[old];
            assert!(g >= last_cluster, "cluster ids must be non-decreasing at {pos}");
            last_cluster = g;
        }
        assert_eq!(*cl.boundaries().last().unwrap(), 30);
    }

    #[test]
    fn invalid_cluster_counts_are_rejected() {
        let data = grid_data(5);
        assert!(kmeans_cluster(&data, 0, 1).is_err());
        assert!(kmeans_cluster(&data, 6, 1).is_err());
    }
}

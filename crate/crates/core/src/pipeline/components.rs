//! Nodule extraction: connected-component labeling of the thresholded PC mask.
//!
//! Two-pass labeling with a union-find forest. Provisional labels are merged
//! on the first raster scan; the second scan resolves roots and numbers the
//! components in order of first appearance, which is the order of their
//! smallest `(row, col)` pixel.

use alloc::vec;
use alloc::vec::Vec;

use super::Nodule;
use crate::constants::Connectivity;
use crate::frame::BinaryMask;

struct Forest {
    parent: Vec<u32>,
}

impl Forest {
    fn new() -> Self {
        // Label 0 is background and never used as a parent.
        Self { parent: vec![0] }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn root(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            // path halving
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let (ra, rb) = (self.root(a), self.root(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        lo
    }

    /// Folds a neighbour label into the label chosen so far (0 = none yet).
    fn merge(&mut self, current: u32, neighbour: u32) -> u32 {
        match (current, neighbour) {
            (c, 0) => c,
            (0, n) => n,
            (c, n) => self.union(c, n),
        }
    }
}

/// Label image: 0 for background, otherwise a 1-based component id in
/// smallest-pixel order. Returns the labels and the component count.
pub fn label_components(mask: &BinaryMask, connectivity: Connectivity) -> (Vec<u32>, usize) {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    let bits = mask.bits();
    let mut labels = vec![0u32; w * h];
    let mut forest = Forest::new();

    for row in 0..h {
        for col in 0..w {
            let idx = row * w + col;
            if !bits[idx] {
                continue;
            }
            let mut current = 0u32;
            if col > 0 {
                current = forest.merge(current, labels[idx - 1]);
            }
            if row > 0 {
                let up = idx - w;
                current = forest.merge(current, labels[up]);
                if connectivity == Connectivity::Eight {
                    if col > 0 {
                        current = forest.merge(current, labels[up - 1]);
                    }
                    if col + 1 < w {
                        current = forest.merge(current, labels[up + 1]);
                    }
                }
            }
            labels[idx] = if current == 0 { forest.make() } else { current };
        }
    }

    let mut renumber = vec![0u32; forest.parent.len()];
    let mut count = 0u32;
    for label in labels.iter_mut().filter(|l| **l != 0) {
        let root = forest.root(*label) as usize;
        if renumber[root] == 0 {
            count += 1;
            renumber[root] = count;
        }
        *label = renumber[root];
    }
    (labels, count as usize)
}

/// Partitions the set pixels of `mask` into maximal connected components.
/// Nodules come back unassigned, ordered (and numbered from 0) by their
/// smallest pixel in row-major order; each pixel list is row-major.
pub fn connected_components(mask: &BinaryMask, connectivity: Connectivity) -> Vec<Nodule> {
    let (labels, count) = label_components(mask, connectivity);
    let w = mask.width() as usize;
    let mut nodules: Vec<Nodule> = (0..count).map(Nodule::unassigned).collect();
    for (idx, &label) in labels.iter().enumerate() {
        if label != 0 {
            nodules[label as usize - 1]
                .pixels
                .push(((idx / w) as u32, (idx % w) as u32));
        }
    }
    nodules
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use alloc::collections::VecDeque;
    use proptest::prelude::*;

    /// Breadth-first flood fill from every unvisited set pixel, in row-major
    /// seed order.
    fn flood_fill_oracle(mask: &BinaryMask, conn: Connectivity) -> Vec<Vec<(u32, u32)>> {
        let (w, h) = (mask.width() as i64, mask.height() as i64);
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let steps: &[(i64, i64)] = match conn {
            Connectivity::Four => &[(-1, 0), (1, 0), (0, -1), (0, 1)],
            Connectivity::Eight => &[
                (-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1),
            ],
        };
        for r in 0..h {
            for c in 0..w {
                if !mask.get(r as u32, c as u32) || seen.contains(&(r, c)) {
                    continue;
                }
                let mut comp = Vec::new();
                let mut queue = VecDeque::from([(r, c)]);
                seen.insert((r, c));
                while let Some((pr, pc)) = queue.pop_front() {
                    comp.push((pr as u32, pc as u32));
                    for (dr, dc) in steps {
                        let (nr, nc) = (pr + dr, pc + dc);
                        if nr >= 0 && nr < h && nc >= 0 && nc < w
                            && mask.get(nr as u32, nc as u32)
                            && seen.insert((nr, nc))
                        {
                            queue.push_back((nr, nc));
                        }
                    }
                }
                comp.sort();
                out.push(comp);
            }
        }
        out
    }

    fn mask_from(w: u32, h: u32, on: &[(u32, u32)]) -> BinaryMask {
        BinaryMask::from_fn(w, h, |r, c| on.contains(&(r, c)))
    }

    #[test]
    fn empty_mask() {
        assert!(connected_components(&BinaryMask::empty(5, 5), Connectivity::Eight).is_empty());
    }

    #[test]
    fn singleton() {
        let n = connected_components(&mask_from(3, 3, &[(1, 1)]), Connectivity::Eight);
        assert_eq!(n.len(), 1);
        assert_eq!(n[0].pixels, vec![(1, 1)]);
        assert_eq!(n[0].id, 0);
        assert_eq!(n[0].assigned_organ, None);
    }

    #[test]
    fn diagonal_joins_only_under_eight() {
        let m = mask_from(5, 5, &[(0, 0), (1, 1)]);
        assert_eq!(connected_components(&m, Connectivity::Eight).len(), 1);
        assert_eq!(connected_components(&m, Connectivity::Four).len(), 2);
        assert_eq!(flood_fill_oracle(&m, Connectivity::Eight).len(), 1);
    }

    #[test]
    fn u_shape_merges_late() {
        // Two arms only meet on the bottom row, exercising the union step.
        let m = BinaryMask::from_fn(5, 4, |r, c| c == 0 || c == 4 || r == 3);
        let n = connected_components(&m, Connectivity::Four);
        assert_eq!(n.len(), 1);
        assert_eq!(n[0].pixels.len(), m.count());
    }

    #[test]
    fn ordered_by_smallest_pixel() {
        // Component B starts at (0,3) but component A reaches row 0 earlier.
        let m = mask_from(5, 3, &[(0, 3), (1, 0), (0, 1), (2, 4)]);
        let n = connected_components(&m, Connectivity::Four);
        let firsts: Vec<_> = n.iter().map(|x| x.pixels[0]).collect();
        assert_eq!(firsts, vec![(0, 1), (0, 3), (1, 0), (2, 4)]);
        assert_eq!(n.iter().map(|x| x.id).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    }

    fn arb_mask() -> impl Strategy<Value = BinaryMask> {
        (1u32..=16, 1u32..=16, 0.05f64..0.7).prop_flat_map(|(w, h, p)| {
            proptest::collection::vec(proptest::bool::weighted(p), (w * h) as usize)
                .prop_map(move |bits| BinaryMask::from_bits(w, h, bits).unwrap())
        })
    }

    proptest! {
        #[test]
        fn matches_flood_fill(m in arb_mask(), eight in any::<bool>()) {
            let conn = if eight { Connectivity::Eight } else { Connectivity::Four };
            let got: Vec<Vec<(u32, u32)>> = connected_components(&m, conn)
                .into_iter().map(|n| n.pixels).collect();
            prop_assert_eq!(got, flood_fill_oracle(&m, conn));
        }

        #[test]
        fn components_partition_the_mask(m in arb_mask()) {
            let nodules = connected_components(&m, Connectivity::Eight);
            let mut union = BTreeSet::new();
            let mut total = 0;
            for n in &nodules {
                prop_assert!(!n.pixels.is_empty());
                total += n.pixels.len();
                union.extend(n.pixels.iter().copied());
            }
            prop_assert_eq!(total, union.len());
            let expected: BTreeSet<_> = m.iter_set().collect();
            prop_assert_eq!(union, expected);
        }
    }
}

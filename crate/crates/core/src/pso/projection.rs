use std::collections::HashMap;

use crate::point::Point3;

/// Nearest-candidate lookup over a bucket grid.
///
/// Ties in Euclidean distance resolve to the lexicographically smallest
/// `(x, y, z)`.
#[derive(Debug, Clone)]
pub struct CandidateIndex {
    points: Vec<Point3>,
    origin: Point3,
    cell: f64,
    span: [i64; 3],
    buckets: HashMap<[i64; 3], Vec<usize>>,
}

impl CandidateIndex {
    pub fn new(points: &[Point3], cell: f64) -> Self {
        assert!(cell > 0.0, "bucket size must be positive");
        let origin = points.iter().fold(
            Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            |lo, p| Point3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z)),
        );
        let mut index = Self {
            points: points.to_vec(),
            origin,
            cell,
            span: [0; 3],
            buckets: HashMap::new(),
        };
        for (i, p) in points.iter().enumerate() {
            let key = index.key(*p);
            for (span, k) in index.span.iter_mut().zip(key) {
                *span = (*span).max(k);
            }
            index.buckets.entry(key).or_default().push(i);
        }
        index
    }

    fn key(&self, p: Point3) -> [i64; 3] {
        let f = |v: f64, o: f64| ((v - o) / self.cell).floor() as i64;
        [f(p.x, self.origin.x), f(p.y, self.origin.y), f(p.z, self.origin.z)]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> Point3 {
        self.points[i]
    }

    fn better(&self, a: (f64, usize), b: (f64, usize)) -> bool {
        a.0 < b.0 || (a.0 == b.0 && self.points[a.1].lex_cmp(&self.points[b.1]).is_lt())
    }

    /// Index of the candidate closest to `target`.
    pub fn nearest(&self, target: Point3) -> Option<usize> {
        if self.points.is_empty() {
            return None;
        }
        let c = self.key(target);
        // Rings beyond this distance hold no buckets at all.
        let reach = (0..3)
            .map(|a| c[a].abs().max((self.span[a] - c[a]).abs()))
            .max()
            .unwrap_or(0);
        let mut best: Option<(f64, usize)> = None;
        for r in 0..=reach {
            self.scan_ring(c, r, target, &mut best);
            if let Some((d2, _)) = best {
                // Anything in ring r + 1 is at least r cells away.
                let bound = r as f64 * self.cell;
                if bound * bound > d2 {
                    break;
                }
            }
        }
        best.map(|b| b.1)
    }

    fn scan_ring(&self, c: [i64; 3], r: i64, target: Point3, best: &mut Option<(f64, usize)>) {
        for dx in -r..=r {
            for dy in -r..=r {
                let on_face = dx.abs() == r || dy.abs() == r;
                let dzs: Box<dyn Iterator<Item = i64>> = if on_face {
                    Box::new(-r..=r)
                } else {
                    Box::new([-r, r].into_iter().take(if r == 0 { 1 } else { 2 }))
                };
                for dz in dzs {
                    let Some(ids) = self.buckets.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) else {
                        continue;
                    };
                    for &i in ids {
                        let cand = (self.points[i].distance_sq(target), i);
                        if best.is_none_or(|b| self.better(cand, b)) {
                            *best = Some(cand);
                        }
                    }
                }
            }
        }
    }
}

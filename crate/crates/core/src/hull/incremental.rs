//! Randomized incremental 3D convex hull.
//!
//! Every pending point keeps one conflict face it sees. Inserting a point
//! walks the visible region from that face, stitches a fan of new faces onto
//! the horizon, and redistributes the orphaned points of the deleted faces
//! among the new faces. A point that sees none of them is inside for good.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::predicates::orient3d;
use crate::geometry::Vec3;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Face {
    v: [u32; 3],
    /// `nbr[i]` shares the edge `v[i] -> v[i + 1]`.
    nbr: [u32; 3],
    alive: bool,
    outside: Vec<u32>,
}

struct Builder<'a> {
    pts: &'a [Vec3],
    faces: Vec<Face>,
    conflict: Vec<u32>,
    mark: Vec<u32>,
    stamp: u32,
}

impl Builder<'_> {
    fn sees(&self, f: u32, p: u32) -> bool {
        let [a, b, c] = self.faces[f as usize].v.map(|i| &self.pts[i as usize]);
        orient3d(a, b, c, &self.pts[p as usize]) == Ordering::Greater
    }

    fn add_face(&mut self, v: [u32; 3]) -> u32 {
        self.faces.push(Face {
            v,
            nbr: [NONE; 3],
            alive: true,
            outside: Vec::new(),
        });
        self.mark.push(0);
        (self.faces.len() - 1) as u32
    }

    fn assign(&mut self, p: u32, candidates: &[u32]) {
        self.conflict[p as usize] = NONE;
        for &f in candidates {
            if self.sees(f, p) {
                self.conflict[p as usize] = f;
                self.faces[f as usize].outside.push(p);
                return;
            }
        }
    }

    fn insert(&mut self, p: u32) {
        let start = self.conflict[p as usize];
        self.stamp += 1;
        let stamp = self.stamp;

        // Visible faces, found by a walk over face adjacency.
        let mut visible = vec![start];
        self.mark[start as usize] = stamp;
        let mut k = 0;
        while k < visible.len() {
            let f = visible[k];
            k += 1;
            for g in self.faces[f as usize].nbr {
                if self.mark[g as usize] != stamp && self.sees(g, p) {
                    self.mark[g as usize] = stamp;
                    visible.push(g);
                }
            }
        }

        // Horizon edges keep the orientation of their visible face, so the
        // new faces `[a, b, p]` are outward oriented.
        let mut by_start: Vec<(u32, u32)> = Vec::new();
        let mut created = Vec::new();
        for &f in &visible {
            for i in 0..3 {
                let g = self.faces[f as usize].nbr[i];
                if self.mark[g as usize] == stamp {
                    continue;
                }
                let a = self.faces[f as usize].v[i];
                let b = self.faces[f as usize].v[(i + 1) % 3];
                let h = self.add_face([a, b, p]);
                self.faces[h as usize].nbr[0] = g;
                let back = self.faces[g as usize]
                    .nbr
                    .iter()
                    .position(|&x| x == f)
                    .expect("adjacency is symmetric");
                self.faces[g as usize].nbr[back] = h;
                by_start.push((a, h));
                created.push(h);
            }
        }
        by_start.sort_unstable();
        let find = |v: u32| {
            let i = by_start
                .binary_search_by_key(&v, |&(a, _)| a)
                .expect("horizon is a closed cycle");
            by_start[i].1
        };
        for &h in &created {
            let b = self.faces[h as usize].v[1];
            let next = find(b);
            self.faces[h as usize].nbr[1] = next;
            self.faces[next as usize].nbr[2] = h;
        }

        let mut orphans = Vec::new();
        for &f in &visible {
            let face = &mut self.faces[f as usize];
            face.alive = false;
            orphans.append(&mut face.outside);
        }
        for q in orphans {
            if q != p {
                self.assign(q, &created);
            }
        }
        self.conflict[p as usize] = NONE;
    }
}

/// Triangles of the convex hull of `pts`, outward oriented, or `None` when
/// the points are affinely dependent. `seed` fixes the insertion order.
pub fn hull3(pts: &[Vec3], seed: u64) -> Option<Vec<[u32; 3]>> {
    if pts.len() < 4 {
        return None;
    }
    let simplex = initial_simplex(pts)?;
    let mut b = Builder {
        pts,
        faces: Vec::new(),
        conflict: vec![NONE; pts.len()],
        mark: Vec::new(),
        stamp: 0,
    };
    let [i0, i1, i2, i3] = simplex;
    // Orient so that i3 lies below the base face.
    let (i1, i2) = if orient3d(&pts[i0 as usize], &pts[i1 as usize], &pts[i2 as usize], &pts[i3 as usize])
        == Ordering::Greater
    {
        (i2, i1)
    } else {
        (i1, i2)
    };
    let f0 = b.add_face([i0, i1, i2]);
    let f1 = b.add_face([i0, i3, i1]);
    let f2 = b.add_face([i1, i3, i2]);
    let f3 = b.add_face([i2, i3, i0]);
    b.faces[f0 as usize].nbr = [f1, f2, f3];
    b.faces[f1 as usize].nbr = [f3, f2, f0];
    b.faces[f2 as usize].nbr = [f1, f3, f0];
    b.faces[f3 as usize].nbr = [f2, f1, f0];

    let mut order: Vec<u32> = (0..pts.len() as u32)
        .filter(|i| !simplex.contains(i))
        .collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let initial = [f0, f1, f2, f3];
    for &p in &order {
        b.assign(p, &initial);
    }
    for &p in &order {
        if b.conflict[p as usize] != NONE {
            b.insert(p);
        }
    }
    Some(b.faces.into_iter().filter(|f| f.alive).map(|f| f.v).collect())
}

fn initial_simplex(pts: &[Vec3]) -> Option<[u32; 4]> {
    let by = |key: &dyn Fn(&Vec3) -> f64| {
        (0..pts.len())
            .max_by(|&i, &j| key(&pts[i]).total_cmp(&key(&pts[j])))
            .unwrap()
    };
    let i0 = by(&|p| -p.x);
    let a = pts[i0];
    let i1 = by(&|p| (p - a).norm_squared());
    let b = pts[i1];
    let ab = b - a;
    let i2 = by(&|p| ab.cross(&(p - a)).norm_squared());
    let n = ab.cross(&(pts[i2] - a));
    let i3 = by(&|p| n.dot(&(p - a)).abs());
    let c = pts[i2];
    if [i0, i1, i2].iter().any(|&i| i == i3) || i1 == i0 || i2 == i0 || i2 == i1 {
        return None;
    }
    if orient3d(&a, &b, &c, &pts[i3]) == Ordering::Equal {
        return None;
    }
    Some([i0 as u32, i1 as u32, i2 as u32, i3 as u32])
}

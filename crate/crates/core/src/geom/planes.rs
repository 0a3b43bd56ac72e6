//! `k`-planes of `P^n(F_Q)` as reduced row echelon matrices.
//!
//! Planes are grouped by pivot set (Schubert cell). Within a cell the free
//! entries are read as base-`Q` digits of a local index, so every plane has
//! a stable global id: cell offset plus local index. Cells are visited in
//! lexicographic order of pivot sets.

use rayon::prelude::*;

use crate::gf::{Elem, FieldSpec};

/// A `k`-plane given by its RREF basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneRep {
    pub k: usize,
    /// `(k+1) x (n+1)` rows over the base field.
    pub rows: Vec<Vec<Elem>>,
    pub pivots: Vec<usize>,
}

/// One Schubert cell.
#[derive(Debug, Clone)]
struct Cell {
    pivots: Vec<usize>,
    /// `(row, col)` positions of free entries, most significant first.
    free: Vec<(usize, usize)>,
    offset: u64,
    size: u64,
}

/// A contiguous run of plane ids inside one cell.
#[derive(Debug, Clone, Copy)]
pub struct Chunk {
    cell: usize,
    start: u64,
    end: u64,
}

/// Enumeration plan for `G(k, n)` over one field.
#[derive(Debug, Clone)]
pub struct PlaneSpace {
    pub k: usize,
    pub n: usize,
    q: u64,
    cells: Vec<Cell>,
    total: u64,
}

const CHUNK: u64 = 2048;

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - left {
            cur.push(i);
            go(i + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

impl PlaneSpace {
    pub fn new(k: usize, n: usize, field: &FieldSpec) -> Self {
        assert!(k <= n, "plane dimension exceeds ambient dimension");
        let q = field.size() as u64;
        let mut cells = Vec::new();
        let mut offset = 0u64;
        for pivots in combinations(n + 1, k + 1) {
            let mut free = Vec::new();
            for (i, &p) in pivots.iter().enumerate() {
                for c in p + 1..=n {
                    if !pivots.contains(&c) {
                        free.push((i, c));
                    }
                }
            }
            let size = q.checked_pow(free.len() as u32).expect("plane count overflows u64");
            cells.push(Cell { pivots, free, offset, size });
            offset += size;
        }
        PlaneSpace { k, n, q, cells, total: offset }
    }

    /// Number of planes, `#G(k, n)(F_Q)`.
    pub fn count(&self) -> u64 {
        self.total
    }

    pub fn chunks(&self) -> Vec<Chunk> {
        let mut out = Vec::new();
        for (ci, c) in self.cells.iter().enumerate() {
            let mut s = 0;
            while s < c.size {
                let e = (s + CHUNK).min(c.size);
                out.push(Chunk { cell: ci, start: s, end: e });
                s = e;
            }
        }
        out
    }

    fn fill(&self, cell: &Cell, local: u64, rows: &mut [Vec<Elem>]) {
        for r in rows.iter_mut() {
            r.iter_mut().for_each(|x| *x = 0);
        }
        for (i, &p) in cell.pivots.iter().enumerate() {
            rows[i][p] = 1;
        }
        let mut x = local;
        for &(r, c) in cell.free.iter().rev() {
            rows[r][c] = (x % self.q) as Elem;
            x /= self.q;
        }
    }

    /// The plane with global id `id`.
    pub fn plane(&self, id: u64) -> Option<PlaneRep> {
        let ci = self.cells.partition_point(|c| c.offset + c.size <= id);
        let cell = self.cells.get(ci)?;
        let mut rows = vec![vec![0; self.n + 1]; self.k + 1];
        self.fill(cell, id - cell.offset, &mut rows);
        Some(PlaneRep { k: self.k, rows, pivots: cell.pivots.clone() })
    }

    /// Calls `f(id, rows)` for every plane of the chunk, in id order.
    pub fn for_each_in_chunk(&self, chunk: Chunk, mut f: impl FnMut(u64, &[Vec<Elem>])) {
        let cell = &self.cells[chunk.cell];
        let mut rows = vec![vec![0; self.n + 1]; self.k + 1];
        for local in chunk.start..chunk.end {
            self.fill(cell, local, &mut rows);
            f(cell.offset + local, &rows);
        }
    }

    /// Parallel fold over all planes. `fold` accumulates one chunk from
    /// `init()`, `merge` combines chunk results in chunk order, so the result
    /// does not depend on scheduling.
    pub fn fold<T, I, F, M>(&self, init: I, fold: F, merge: M) -> T
    where
        T: Send,
        I: Fn() -> T + Sync,
        F: Fn(&mut T, u64, &[Vec<Elem>]) + Sync,
        M: Fn(T, T) -> T,
    {
        let parts: Vec<T> = self
            .chunks()
            .into_par_iter()
            .map(|ch| {
                let mut acc = init();
                self.for_each_in_chunk(ch, |id, rows| fold(&mut acc, id, rows));
                acc
            })
            .collect();
        parts.into_iter().fold(init(), merge)
    }

    /// All planes, in id order. Only sensible for small spaces.
    pub fn iter(&self) -> impl Iterator<Item = PlaneRep> + '_ {
        (0..self.total).map(move |id| self.plane(id).unwrap())
    }
}

/// Every `k`-plane of `P^n(F)` exactly once.
pub fn enumerate_planes(k: usize, n: usize, field: &FieldSpec) -> Vec<PlaneRep> {
    PlaneSpace::new(k, n, field).iter().collect()
}

//! Trail post-processing: erosion, topology-preserving thinning, contour
//! extraction and the enclosure test.
//!
//! Foreground is 8-connected and background 4-connected throughout.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::field::Grid;
use crate::geometry::{Point, PointSet, Polygon};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("EMPTY_TRAIL: the image has no set cells")]
    EmptyTrail,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryImage {
    pub grid: Grid,
    pub bits: Vec<bool>,
}

impl BinaryImage {
    pub fn empty(grid: Grid) -> Self {
        Self {
            grid,
            bits: vec![false; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(grid.len());
        for y in 0..grid.height {
            for x in 0..grid.width {
                bits.push(f(x, y));
            }
        }
        Self { grid, bits }
    }

    pub fn width(&self) -> usize {
        self.grid.width
    }

    pub fn height(&self) -> usize {
        self.grid.height
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[self.grid.index(x, y)]
    }

    /// Like [`get`](Self::get) but off-grid reads as unset.
    pub fn get_signed(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width()
            && (y as usize) < self.height()
            && self.get(x as usize, y as usize)
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        let i = self.grid.index(x, y);
        self.bits[i] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    /// True when every set cell of `self` is set in `other`.
    pub fn is_subset_of(&self, other: &BinaryImage) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }
}

/// Skeleton of the trail with its junctions and independent cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeNetwork {
    pub skeleton: BinaryImage,
    pub junctions: Vec<(usize, usize)>,
    pub cycles: usize,
}

impl TubeNetwork {
    /// The largest skeleton component, holes filled, covers every point.
    pub fn encloses(&self, ps: &PointSet) -> bool {
        self.cycles >= 1 && enclosure_check(&self.skeleton, ps)
    }
}

const N4: [(isize, isize); 4] = [(0, -1), (1, 0), (0, 1), (-1, 0)];
// Clockwise ring starting north, so consecutive entries are 4-adjacent.
const RING: [(isize, isize); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

/// One pass of 4-neighbour erosion. Off-grid neighbours count as unset.
pub fn erode(img: &BinaryImage) -> BinaryImage {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let mut out = BinaryImage::empty(img.grid);
    for y in 0..h {
        for x in 0..w {
            if img.get(x as usize, y as usize)
                && N4.iter().all(|&(dx, dy)| img.get_signed(x + dx, y + dy))
            {
                out.set(x as usize, y as usize, true);
            }
        }
    }
    out
}

/// 8-connected component labels (0 = background) and the size of each label.
fn label_components(img: &BinaryImage) -> (Vec<u32>, Vec<usize>) {
    let (w, h) = (img.width(), img.height());
    let mut labels = vec![0u32; w * h];
    let mut sizes = vec![0usize];
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if !img.bits[start] || labels[start] != 0 {
            continue;
        }
        let label = sizes.len() as u32;
        sizes.push(0);
        labels[start] = label;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            sizes[label as usize] += 1;
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            for (dx, dy) in RING {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if img.bits[j] && labels[j] == 0 {
                    labels[j] = label;
                    queue.push_back(j);
                }
            }
        }
    }
    (labels, sizes)
}

/// Largest 8-connected component; ties go to the one found first in raster order.
fn largest_component(img: &BinaryImage) -> Option<BinaryImage> {
    let (labels, sizes) = label_components(img);
    let best = (1..sizes.len()).max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a)))?;
    Some(BinaryImage {
        grid: img.grid,
        bits: labels.iter().map(|&l| l as usize == best).collect(),
    })
}

/// Background cells 4-connected to the image border.
fn outside(img: &BinaryImage) -> Vec<bool> {
    let (w, h) = (img.width(), img.height());
    let mut seen = vec![false; w * h];
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            let border = x == 0 || y == 0 || x == w - 1 || y == h - 1;
            let i = y * w + x;
            if border && !img.bits[i] {
                seen[i] = true;
                queue.push_back(i);
            }
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for (dx, dy) in N4 {
            let (nx, ny) = (x + dx, y + dy);
            if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                continue;
            }
            let j = ny as usize * w + nx as usize;
            if !img.bits[j] && !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen
}

fn fill_holes(img: &BinaryImage) -> BinaryImage {
    let out = outside(img);
    BinaryImage {
        grid: img.grid,
        bits: out.iter().map(|o| !o).collect(),
    }
}

/// Number of enclosed background regions (4-connected).
fn hole_count(img: &BinaryImage) -> usize {
    let filled = fill_holes(img);
    let holes = BinaryImage {
        grid: img.grid,
        bits: filled
            .bits
            .iter()
            .zip(&img.bits)
            .map(|(f, s)| *f && !*s)
            .collect(),
    };
    // Holes are 4-connected; count them with a 4-neighbour flood.
    let (w, h) = (img.width(), img.height());
    let mut seen = vec![false; w * h];
    let mut count = 0;
    for start in 0..w * h {
        if !holes.bits[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            for (dx, dy) in N4 {
                if holes.get_signed(x + dx, y + dy) {
                    let j = (y + dy) as usize * w + (x + dx) as usize;
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
    }
    count
}

/// Largest component with its holes filled.
fn filled_largest(img: &BinaryImage) -> Option<BinaryImage> {
    largest_component(img).map(|c| fill_holes(&c))
}

fn neighbourhood(img: &BinaryImage, x: isize, y: isize) -> [bool; 8] {
    let mut n = [false; 8];
    for (k, (dx, dy)) in RING.iter().enumerate() {
        n[k] = img.get_signed(x + dx, y + dy);
    }
    n
}

/// A set cell whose removal changes neither the foreground 8-components nor
/// the background 4-components of its neighbourhood.
fn is_simple(n: &[bool; 8]) -> bool {
    // Foreground 8-components among the ring.
    let mut fg = 0;
    let mut visited = [false; 8];
    for s in 0..8 {
        if !n[s] || visited[s] {
            continue;
        }
        fg += 1;
        let mut stack = vec![s];
        visited[s] = true;
        while let Some(k) = stack.pop() {
            for j in 0..8 {
                if n[j] && !visited[j] && ring_adjacent8(k, j) {
                    visited[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    // Background 4-components among the ring that touch a 4-neighbour.
    let mut bg = 0;
    let mut visited = [false; 8];
    for s in (0..8).step_by(2) {
        if n[s] || visited[s] {
            continue;
        }
        bg += 1;
        let mut stack = vec![s];
        visited[s] = true;
        while let Some(k) = stack.pop() {
            for j in [(k + 1) % 8, (k + 7) % 8] {
                if !n[j] && !visited[j] {
                    visited[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    fg == 1 && bg == 1
}

/// 8-adjacency between two ring cells (both neighbours of the centre).
fn ring_adjacent8(a: usize, b: usize) -> bool {
    let (ax, ay) = RING[a];
    let (bx, by) = RING[b];
    a != b && (ax - bx).abs() <= 1 && (ay - by).abs() <= 1
}

/// Sequential directional thinning by simple-point removal.
///
/// Each sub-pass deletes border cells facing one direction, re-testing every
/// candidate against the current image, so topology is preserved exactly:
/// trees shrink to single cells and every cycle survives as a thin loop.
pub fn thin_to_network(trail: &BinaryImage) -> Result<TubeNetwork, ShapeError> {
    if trail.is_empty() {
        return Err(ShapeError::EmptyTrail);
    }
    let mut img = trail.clone();
    let (w, h) = (img.width() as isize, img.height() as isize);
    loop {
        let mut changed = false;
        for &(dx, dy) in &N4 {
            for y in 0..h {
                for x in 0..w {
                    if !img.get(x as usize, y as usize) || img.get_signed(x + dx, y + dy) {
                        continue;
                    }
                    if is_simple(&neighbourhood(&img, x, y)) {
                        img.set(x as usize, y as usize, false);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut junctions = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if img.get(x as usize, y as usize)
                && neighbourhood(&img, x, y).iter().filter(|b| **b).count() >= 3
            {
                junctions.push((x as usize, y as usize));
            }
        }
    }
    let cycles = hole_count(&img);
    Ok(TubeNetwork {
        skeleton: img,
        junctions,
        cycles,
    })
}

/// Independent cycles of a binary image (enclosed background regions).
pub fn cycle_count(img: &BinaryImage) -> usize {
    hole_count(img)
}

/// Number of 8-connected components.
pub fn component_count(img: &BinaryImage) -> usize {
    label_components(img).1.len() - 1
}

/// Adds a cell to every diagonal-only contact so the region becomes
/// 4-connected, refilling any hole this closes. Repeats until stable.
fn close_diagonal_contacts(img: &BinaryImage) -> BinaryImage {
    let mut img = img.clone();
    let (w, h) = (img.width(), img.height());
    loop {
        let mut changed = false;
        for y in 0..h.saturating_sub(1) {
            for x in 0..w.saturating_sub(1) {
                let a = img.get(x, y);
                let b = img.get(x + 1, y);
                let c = img.get(x, y + 1);
                let d = img.get(x + 1, y + 1);
                if a && d && !b && !c {
                    img.set(x + 1, y, true);
                    changed = true;
                } else if b && c && !a && !d {
                    img.set(x, y, true);
                    changed = true;
                }
            }
        }
        if !changed {
            return img;
        }
        img = fill_holes(&img);
    }
}

/// Outer boundary of the trail's largest component, holes filled.
///
/// The contour follows cell edges, so the polygon is the union of the
/// component's cells: every cell centre lies strictly inside it. Runs of
/// collinear edges are merged.
pub fn outer_contour(trail: &BinaryImage) -> Result<Polygon, ShapeError> {
    let region = filled_largest(trail).ok_or(ShapeError::EmptyTrail)?;
    let region = close_diagonal_contacts(&region);
    let (w, h) = (region.width() as isize, region.height() as isize);

    // Directed cell edges with the region on the left, in doubled
    // coordinates so cell corners are integers.
    let mut next: BTreeMap<(isize, isize), (isize, isize)> = BTreeMap::new();
    for y in 0..h {
        for x in 0..w {
            if !region.get(x as usize, y as usize) {
                continue;
            }
            let (l, r, b, t) = (2 * x - 1, 2 * x + 1, 2 * y - 1, 2 * y + 1);
            if !region.get_signed(x, y - 1) {
                next.insert((l, b), (r, b));
            }
            if !region.get_signed(x + 1, y) {
                next.insert((r, b), (r, t));
            }
            if !region.get_signed(x, y + 1) {
                next.insert((r, t), (l, t));
            }
            if !region.get_signed(x - 1, y) {
                next.insert((l, t), (l, b));
            }
        }
    }
    let start = *next.keys().next().ok_or(ShapeError::EmptyTrail)?;
    let mut ring = vec![start];
    let mut v = next[&start];
    while v != start {
        ring.push(v);
        v = next[&v];
    }

    let n = ring.len();
    let grid = trail.grid;
    let vertices: Vec<Point> = (0..n)
        .filter(|&i| {
            let p = ring[(i + n - 1) % n];
            let c = ring[i];
            let q = ring[(i + 1) % n];
            (c.0 - p.0) * (q.1 - c.1) - (c.1 - p.1) * (q.0 - c.0) != 0
        })
        .map(|i| {
            let (cx, cy) = ring[i];
            Point::new(
                grid.origin.x + 0.5 * cx as f64 * grid.dx,
                grid.origin.y + 0.5 * cy as f64 * grid.dx,
            )
        })
        .collect();
    Polygon::new(vertices)
        .map(|p| p.canonical())
        .map_err(|_| ShapeError::EmptyTrail)
}

/// True iff every point maps to a cell of the filled largest component.
pub fn enclosure_check(trail: &BinaryImage, ps: &PointSet) -> bool {
    let Some(region) = filled_largest(trail) else {
        return false;
    };
    ps.points().iter().all(|p| match region.grid.cell_of(*p) {
        Some((x, y)) => region.get(x, y),
        None => false,
    })
}

//! Sampled planar sets: discs, grid-sampled regions with marching-squares
//! boundaries, Hausdorff estimates and CSV/SVG export.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{c64, cis, C64};

/// Closed or open disc `D(center, radius)`; membership is strict.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disc {
    pub center: C64,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: C64, radius: f64) -> Result<Disc> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("disc radius {radius}")));
        }
        Ok(Disc { center, radius })
    }

    pub fn contains(&self, z: C64) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// `max{|z| : z ∈ D}`.
    pub fn max_modulus(&self) -> f64 {
        self.center.norm() + self.radius
    }

    pub fn boundary_point(&self, theta: f64) -> C64 {
        self.center + cis(theta) * self.radius
    }
}

/// Signed distance to the union of discs: negative inside.
pub fn disc_union_distance(discs: &[Disc], z: C64) -> f64 {
    discs
        .iter()
        .map(|d| (z - d.center).norm() - d.radius)
        .fold(f64::INFINITY, f64::min)
}

/// Points on the boundary of a union of discs, `per_disc` samples per circle.
pub fn disc_union_boundary(discs: &[Disc], per_disc: usize) -> Vec<C64> {
    let mut out = Vec::new();
    for (k, d) in discs.iter().enumerate() {
        if d.radius == 0.0 {
            out.push(d.center);
            continue;
        }
        for i in 0..per_disc {
            let z = d.boundary_point(std::f64::consts::TAU * i as f64 / per_disc as f64);
            let covered = discs.iter().enumerate().any(|(j, e)| {
                j != k && (z - e.center).norm() < e.radius - 1e-12 * (1.0 + e.radius)
            });
            if !covered {
                out.push(z);
            }
        }
    }
    out
}

/// Square sampling grid: `resolution` nodes per axis over a box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub resolution: usize,
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl GridSpec {
    pub const MIN_RESOLUTION: usize = 16;

    pub fn new(resolution: usize, re: (f64, f64), im: (f64, f64)) -> Result<GridSpec> {
        if resolution < Self::MIN_RESOLUTION {
            return Err(Error::InvalidParameter(format!(
                "grid resolution must be >= {}, got {resolution}",
                Self::MIN_RESOLUTION
            )));
        }
        if !(re.1 > re.0) || !(im.1 > im.0) || !re.0.is_finite() || !im.1.is_finite() {
            return Err(Error::InvalidParameter("empty or non-finite grid box".into()));
        }
        Ok(GridSpec { resolution, re, im })
    }

    /// Box `|Re z − Re c|, |Im z − Im c| ≤ half`.
    pub fn centered(resolution: usize, center: C64, half: f64) -> Result<GridSpec> {
        Self::new(
            resolution,
            (center.re - half, center.re + half),
            (center.im - half, center.im + half),
        )
    }

    pub fn dx(&self) -> f64 {
        (self.re.1 - self.re.0) / (self.resolution - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.im.1 - self.im.0) / (self.resolution - 1) as f64
    }

    pub fn cell_diagonal(&self) -> f64 {
        self.dx().hypot(self.dy())
    }

    pub fn node(&self, i: usize, j: usize) -> C64 {
        c64(
            self.re.0 + i as f64 * self.dx(),
            self.im.0 + j as f64 * self.dy(),
        )
    }
}

/// A sampled planar set.
#[derive(Clone, Debug)]
pub struct Region {
    /// Samples lying in the set.
    pub points: Vec<C64>,
    /// Boundary polylines (closed ones repeat their first vertex).
    pub boundary: Vec<Vec<C64>>,
    /// Grid the region was sampled on, if any.
    pub grid: Option<GridSpec>,
    /// `(min, max)` corners of a box containing every point.
    pub bbox: (C64, C64),
}

impl Region {
    /// Samples `{z : field(z) < level}` on `grid` and traces the level set
    /// with marching squares. Field evaluations run in parallel by row.
    pub fn from_field<F>(grid: GridSpec, level: f64, field: F) -> Region
    where
        F: Fn(C64) -> f64 + Sync,
    {
        let n = grid.resolution;
        let values: Vec<f64> = (0..n)
            .into_par_iter()
            .flat_map_iter(|j| {
                let field = &field;
                (0..n).map(move |i| field(grid.node(i, j)))
            })
            .collect();
        Self::from_values(grid, level, &values)
    }

    /// Same as `from_field` with precomputed node values (row-major by imaginary part).
    pub fn from_values(grid: GridSpec, level: f64, values: &[f64]) -> Region {
        let n = grid.resolution;
        assert_eq!(values.len(), n * n);
        let mut points = Vec::new();
        for j in 0..n {
            for i in 0..n {
                if values[j * n + i] < level {
                    points.push(grid.node(i, j));
                }
            }
        }
        let boundary = marching_squares(&grid, level, values);
        let bbox = (c64(grid.re.0, grid.im.0), c64(grid.re.1, grid.im.1));
        Region {
            points,
            boundary,
            grid: Some(grid),
            bbox,
        }
    }

    /// Region given by explicit samples with an optional outline.
    pub fn from_points(points: Vec<C64>, boundary: Vec<Vec<C64>>) -> Region {
        let all = points.iter().chain(boundary.iter().flatten());
        let mut lo = c64(f64::INFINITY, f64::INFINITY);
        let mut hi = c64(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for z in all {
            lo = c64(lo.re.min(z.re), lo.im.min(z.im));
            hi = c64(hi.re.max(z.re), hi.im.max(z.im));
        }
        Region {
            points,
            boundary,
            grid: None,
            bbox: (lo, hi),
        }
    }

    pub fn boundary_vertices(&self) -> Vec<C64> {
        self.boundary.iter().flatten().copied().collect()
    }

    pub fn cell_diagonal(&self) -> Option<f64> {
        self.grid.map(|g| g.cell_diagonal())
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Two-sided Hausdorff distance, taken as the larger of the filled-sample
    /// and boundary-vertex estimates.
    pub fn hausdorff(&self, other: &Region) -> f64 {
        let filled = hausdorff(&self.points, &other.points);
        let (a, b) = (self.boundary_vertices(), other.boundary_vertices());
        if a.is_empty() || b.is_empty() {
            filled
        } else {
            filled.max(hausdorff(&a, &b))
        }
    }

    /// Hausdorff distance between the traced boundary and the boundary of a
    /// union of discs.
    pub fn disc_union_deviation(&self, discs: &[Disc]) -> f64 {
        let ours = self.boundary_vertices();
        let theirs = disc_union_boundary(discs, 720);
        hausdorff(&ours, &theirs)
    }

    /// Image under `z ↦ f(z)` (used for translations, rotations and conjugation).
    pub fn map(&self, f: impl Fn(C64) -> C64) -> Region {
        let points = self.points.iter().map(|&z| f(z)).collect();
        let boundary = self
            .boundary
            .iter()
            .map(|p| p.iter().map(|&z| f(z)).collect())
            .collect();
        let mut r = Region::from_points(points, boundary);
        r.grid = self.grid;
        r
    }

    /// One `re,im` line per sample point.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.points.len() * 24);
        for z in &self.points {
            let _ = writeln!(s, "{},{}", z.re, z.im);
        }
        s
    }

    /// Self-contained SVG of the boundary: 100 px per unit, origin at the
    /// center of the view box, imaginary axis pointing up.
    pub fn to_svg(&self) -> String {
        const SCALE: f64 = 100.0;
        let verts = self.boundary_vertices();
        let extent = verts
            .iter()
            .chain(self.points.iter())
            .map(|z| z.re.abs().max(z.im.abs()))
            .fold(0.0, f64::max)
            .max(0.5)
            * 1.1;
        let half = extent * SCALE;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.3} {:.3} {:.3} {:.3}" width="{:.0}" height="{:.0}">"#,
            -half,
            -half,
            2.0 * half,
            2.0 * half,
            2.0 * half,
            2.0 * half
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="0" x2="{:.3}" y2="0" style="stroke:#bbbbbb;stroke-width:1"/>"#,
            -half, half
        );
        let _ = writeln!(
            s,
            r#"<line x1="0" y1="{:.3}" x2="0" y2="{:.3}" style="stroke:#bbbbbb;stroke-width:1"/>"#,
            -half, half
        );
        for poly in &self.boundary {
            let pts: Vec<String> = poly
                .iter()
                .map(|z| format!("{:.3},{:.3}", z.re * SCALE, -z.im * SCALE))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" style="fill:none;stroke:#1f4e9c;stroke-width:1.5"/>"#,
                pts.join(" ")
            );
        }
        if self.boundary.is_empty() {
            for z in &self.points {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.3}" cy="{:.3}" r="1" style="fill:#1f4e9c"/>"#,
                    z.re * SCALE,
                    -z.im * SCALE
                );
            }
        }
        s.push_str("</svg>\n");
        s
    }
}

fn marching_squares(grid: &GridSpec, level: f64, values: &[f64]) -> Vec<Vec<C64>> {
    let n = grid.resolution;
    let v = |i: usize, j: usize| values[j * n + i];
    let inside = |i: usize, j: usize| v(i, j) < level;
    let h_id = |i: usize, j: usize| 2 * (j * n + i);
    let v_id = |i: usize, j: usize| 2 * (j * n + i) + 1;
    let cross = |p: (usize, usize), q: (usize, usize)| -> C64 {
        let (vp, vq) = (v(p.0, p.1), v(q.0, q.1));
        let t = if vq != vp { (level - vp) / (vq - vp) } else { 0.5 };
        let t = t.clamp(0.0, 1.0);
        let (zp, zq) = (grid.node(p.0, p.1), grid.node(q.0, q.1));
        zp + (zq - zp) * t
    };

    let mut points: HashMap<usize, C64> = HashMap::new();
    let mut segments: Vec<(usize, usize)> = Vec::new();
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let ins = corners.map(|(a, b)| inside(a, b));
            let code = ins.iter().enumerate().fold(0u8, |c, (k, &b)| c | ((b as u8) << k));
            if code == 0 || code == 15 {
                continue;
            }
            // bottom, right, top, left
            let edges = [
                (h_id(i, j), corners[0], corners[1]),
                (v_id(i + 1, j), corners[1], corners[2]),
                (h_id(i, j + 1), corners[3], corners[2]),
                (v_id(i, j), corners[0], corners[3]),
            ];
            let crossed = |k: usize| {
                let (_, p, q) = edges[k];
                inside(p.0, p.1) != inside(q.0, q.1)
            };
            let mut pair = |a: usize, b: usize| {
                for &k in &[a, b] {
                    let (id, p, q) = edges[k];
                    points.entry(id).or_insert_with(|| cross(p, q));
                }
                segments.push((edges[a].0, edges[b].0));
            };
            if code == 5 || code == 10 {
                let center = 0.25 * (v(i, j) + v(i + 1, j) + v(i + 1, j + 1) + v(i, j + 1));
                let center_in = center < level;
                // isolate the corners whose class differs from the center's
                let isolate_ac = ins[0] != center_in;
                if isolate_ac {
                    pair(3, 0);
                    pair(1, 2);
                } else {
                    pair(0, 1);
                    pair(2, 3);
                }
            } else {
                let ks: Vec<usize> = (0..4).filter(|&k| crossed(k)).collect();
                debug_assert_eq!(ks.len(), 2);
                pair(ks[0], ks[1]);
            }
        }
    }
    chain_segments(&segments, &points)
}

fn chain_segments(segments: &[(usize, usize)], points: &HashMap<usize, C64>) -> Vec<Vec<C64>> {
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        adj.entry(a).or_default().push(s);
        adj.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let next_from = |node: usize, used: &[bool]| -> Option<usize> {
        adj.get(&node)?.iter().copied().find(|&s| !used[s])
    };
    let other = |s: usize, node: usize| {
        let (a, b) = segments[s];
        if a == node {
            b
        } else {
            a
        }
    };
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = segments[start];
        let mut forward = vec![a, b];
        let mut node = b;
        while let Some(s) = next_from(node, &used) {
            used[s] = true;
            node = other(s, node);
            forward.push(node);
        }
        let mut backward = Vec::new();
        let mut node = a;
        while let Some(s) = next_from(node, &used) {
            used[s] = true;
            node = other(s, node);
            backward.push(node);
        }
        backward.reverse();
        backward.extend(forward);
        out.push(backward.into_iter().map(|id| points[&id]).collect());
    }
    out
}

/// Bucketed nearest-neighbour index over a point cloud.
pub struct PointIndex<'a> {
    points: &'a [C64],
    origin: C64,
    cell: f64,
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<u32>>,
}

impl<'a> PointIndex<'a> {
    pub fn new(points: &'a [C64]) -> PointIndex<'a> {
        let mut lo = c64(f64::INFINITY, f64::INFINITY);
        let mut hi = c64(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for z in points {
            lo = c64(lo.re.min(z.re), lo.im.min(z.im));
            hi = c64(hi.re.max(z.re), hi.im.max(z.im));
        }
        if points.is_empty() {
            lo = c64(0.0, 0.0);
            hi = c64(0.0, 0.0);
        }
        let w = (hi.re - lo.re).max(1e-300);
        let h = (hi.im - lo.im).max(1e-300);
        let target = (points.len() as f64).sqrt().max(1.0);
        let cell = (w.max(h) / target).max(1e-300);
        let cols = ((w / cell) as usize + 1).min(1 << 12);
        let rows = ((h / cell) as usize + 1).min(1 << 12);
        let cell = (w / cols as f64).max(h / rows as f64).max(cell);
        let mut buckets = vec![Vec::new(); cols * rows];
        let mut idx = PointIndex {
            points,
            origin: lo,
            cell,
            cols,
            rows,
            buckets: Vec::new(),
        };
        for (k, &z) in points.iter().enumerate() {
            let (c, r) = idx.bucket_of(z);
            buckets[r * cols + c].push(k as u32);
        }
        idx.buckets = buckets;
        idx
    }

    fn bucket_of(&self, z: C64) -> (usize, usize) {
        let c = ((z.re - self.origin.re) / self.cell).floor();
        let r = ((z.im - self.origin.im) / self.cell).floor();
        (
            c.clamp(0.0, (self.cols - 1) as f64) as usize,
            r.clamp(0.0, (self.rows - 1) as f64) as usize,
        )
    }

    /// Distance from `z` to the nearest indexed point other than `skip`.
    pub fn nearest(&self, z: C64, skip: Option<usize>) -> f64 {
        if self.points.is_empty() {
            return f64::INFINITY;
        }
        let (c0, r0) = self.bucket_of(z);
        // distance from z to the bucket grid, for points outside the box
        let out_re = (self.origin.re - z.re)
            .max(z.re - (self.origin.re + self.cols as f64 * self.cell))
            .max(0.0);
        let out_im = (self.origin.im - z.im)
            .max(z.im - (self.origin.im + self.rows as f64 * self.cell))
            .max(0.0);
        let offset = out_re.hypot(out_im);
        let mut best = f64::INFINITY;
        let max_ring = self.cols.max(self.rows);
        for ring in 0..=max_ring {
            let (c0i, r0i, ri) = (c0 as isize, r0 as isize, ring as isize);
            for r in (r0i - ri)..=(r0i + ri) {
                if r < 0 || r >= self.rows as isize {
                    continue;
                }
                let on_edge_row = r == r0i - ri || r == r0i + ri;
                let mut c = c0i - ri;
                while c <= c0i + ri {
                    if c >= 0 && c < self.cols as isize {
                        for &k in &self.buckets[r as usize * self.cols + c as usize] {
                            if Some(k as usize) == skip {
                                continue;
                            }
                            let d = (self.points[k as usize] - z).norm();
                            if d < best {
                                best = d;
                            }
                        }
                    }
                    c += if on_edge_row || ri == 0 { 1 } else { 2 * ri };
                }
            }
            if best <= offset + ring as f64 * self.cell {
                break;
            }
        }
        best
    }
}

/// `max_{a∈A} min_{b∈B} |a − b|`.
pub fn directed_hausdorff(a: &[C64], b: &[C64]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    if b.is_empty() {
        return f64::INFINITY;
    }
    let idx = PointIndex::new(b);
    a.par_iter()
        .map(|&z| idx.nearest(z, None))
        .reduce(|| 0.0, f64::max)
}

/// Symmetric Hausdorff distance between two point clouds.
pub fn hausdorff(a: &[C64], b: &[C64]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

/// Largest nearest-neighbour distance within a cloud.
pub fn max_nn_spacing(points: &[C64]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let idx = PointIndex::new(points);
    points
        .par_iter()
        .enumerate()
        .map(|(k, &z)| idx.nearest(z, Some(k)))
        .reduce(|| 0.0, f64::max)
}

/// Convex hull (counter-clockwise, closed) by monotone chain.
pub fn convex_hull(points: &[C64]) -> Vec<C64> {
    let mut pts: Vec<C64> = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: C64, a: C64, b: C64| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
    let mut hull: Vec<C64> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_region_matches_disc() {
        let grid = GridSpec::centered(128, c64(0.0, 0.0), 1.5).unwrap();
        let r = Region::from_field(grid, 1.0, |z| z.norm());
        assert_eq!(r.boundary.len(), 1);
        let dev = r.disc_union_deviation(&[Disc::new(c64(0.0, 0.0), 1.0).unwrap()]);
        assert!(dev < 0.5 * grid.cell_diagonal(), "{dev}");
        let closed = &r.boundary[0];
        assert_eq!(closed.first(), closed.last());
    }

    #[test]
    fn two_components() {
        let discs = [
            Disc::new(c64(0.0, 0.0), 1.0).unwrap(),
            Disc::new(c64(3.0, 0.0), 1.0).unwrap(),
        ];
        let grid = GridSpec::centered(200, c64(1.5, 0.0), 3.0).unwrap();
        let r = Region::from_field(grid, 0.0, |z| disc_union_distance(&discs, z));
        assert_eq!(r.boundary.len(), 2);
        assert!(r.disc_union_deviation(&discs) < grid.cell_diagonal());
    }

    #[test]
    fn hausdorff_brute_force() {
        let a: Vec<C64> = (0..50).map(|k| c64((k as f64 * 0.37).sin(), (k as f64).cos())).collect();
        let b: Vec<C64> = (0..40).map(|k| c64((k as f64 * 0.91).cos() * 2.0, (k as f64 * 0.2).sin())).collect();
        let brute = |x: &[C64], y: &[C64]| {
            x.iter()
                .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        let want = brute(&a, &b).max(brute(&b, &a));
        assert!((hausdorff(&a, &b) - want).abs() < 1e-15);
        assert_eq!(hausdorff(&a, &a), 0.0);
        // far-away query outside the indexed box
        let idx = PointIndex::new(&a);
        let far = c64(100.0, -50.0);
        let d = a.iter().map(|q| (far - q).norm()).fold(f64::INFINITY, f64::min);
        assert!((idx.nearest(far, None) - d).abs() < 1e-12);
    }

    #[test]
    fn spacing_of_lattice() {
        let pts: Vec<C64> = (0..10)
            .flat_map(|i| (0..10).map(move |j| c64(i as f64 * 0.1, j as f64 * 0.1)))
            .collect();
        assert!((max_nn_spacing(&pts) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn hull_of_square() {
        let pts = [c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 1.0), c64(0.0, 1.0), c64(0.5, 0.5)];
        let h = convex_hull(&pts);
        assert_eq!(h.len(), 5);
        assert_eq!(h.first(), h.last());
    }

    #[test]
    fn svg_and_csv() {
        let grid = GridSpec::centered(32, c64(0.0, 0.0), 1.5).unwrap();
        let r = Region::from_field(grid, 1.0, |z| z.norm());
        let svg = r.to_svg();
        assert!(svg.starts_with("<svg") && svg.contains("polyline") && svg.contains("style="));
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), r.points.len());
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::centered(15, c64(0.0, 0.0), 1.0).is_err());
        assert!(GridSpec::new(16, (1.0, 1.0), (0.0, 1.0)).is_err());
        assert!(Disc::new(c64(0.0, 0.0), -1.0).is_err());
    }
}

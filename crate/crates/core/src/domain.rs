//! Masked square lattices with holes.
//!
//! Sites are addressed by `(ix, iy)` with `0 <= ix < nx`, `0 <= iy < ny`
//! and stored row-major (`iy` outer, `ix` inner). A horizontal link joins
//! `(ix, iy)` to `(ix + 1, iy)`, a vertical link joins `(ix, iy)` to
//! `(ix, iy + 1)`, and plaquette `(px, py)` has lower-left corner
//! `(px, py)`. Links and plaquettes are active when all their corner sites
//! are active.
//!
//! Topology uses 4-connectivity for active sites and 8-connectivity for
//! inactive cells, so two holes touching at a corner count as one.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Axis-aligned rectangular hole in site coordinates: sites
/// `x0..x0 + width` by `y0..y0 + height` are removed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RectHole {
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
}

impl RectHole {
    pub fn new(x0: usize, y0: usize, width: usize, height: usize) -> Self {
        Self {
            x0,
            y0,
            width,
            height,
        }
    }

    fn contains(&self, ix: usize, iy: usize) -> bool {
        ix >= self.x0 && ix < self.x0 + self.width && iy >= self.y0 && iy < self.y0 + self.height
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum HoleShape {
    Rect(RectHole),
    /// Circular hole; center and radius in site units.
    Disc { cx: f64, cy: f64, radius: f64 },
}

/// One excluded region that is fully enclosed by active sites.
#[derive(Clone, Debug, PartialEq)]
pub struct Hole {
    pub shape: HoleShape,
    /// Inactive cells of the enclosed component, row-major.
    pub cells: Vec<(usize, usize)>,
    /// Mean position of `cells`, in site units.
    pub centroid: (f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

/// A lattice link identified by its tail site and direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LinkRef {
    pub axis: Axis,
    pub ix: usize,
    pub iy: usize,
}

/// A closed lattice loop, stored as the cyclic sequence of visited sites.
/// Consecutive sites (including last to first) are 4-neighbors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Loop {
    sites: Vec<(usize, usize)>,
}

impl Loop {
    /// Builds a loop from a cyclic site sequence. The first site must not be
    /// repeated at the end.
    pub fn from_sites(sites: Vec<(usize, usize)>) -> Result<Self> {
        if sites.len() < 4 {
            return Err(Error::Loop(format!("a closed loop needs at least 4 sites, got {}", sites.len())));
        }
        for w in 0..sites.len() {
            let (a, b) = (sites[w], sites[(w + 1) % sites.len()]);
            if a.0.abs_diff(b.0) + a.1.abs_diff(b.1) != 1 {
                return Err(Error::Loop(format!("sites {a:?} and {b:?} are not lattice neighbors")));
            }
        }
        Ok(Self { sites })
    }

    /// Counter-clockwise loop along the perimeter of the site rectangle
    /// `[xa, xb] x [ya, yb]`.
    pub fn rectangle(xa: usize, ya: usize, xb: usize, yb: usize) -> Result<Self> {
        if xb <= xa || yb <= ya {
            return Err(Error::Loop("degenerate rectangle".into()));
        }
        let mut sites = Vec::with_capacity(2 * (xb - xa + yb - ya));
        for x in xa..xb {
            sites.push((x, ya));
        }
        for y in ya..yb {
            sites.push((xb, y));
        }
        for x in (xa + 1..=xb).rev() {
            sites.push((x, yb));
        }
        for y in (ya + 1..=yb).rev() {
            sites.push((xa, y));
        }
        Self::from_sites(sites)
    }

    /// Counter-clockwise boundary of a union of plaquettes. The region must
    /// be a single lattice disc (one boundary component, no pinch points).
    pub fn plaquette_region_boundary(
        npx: usize,
        npy: usize,
        in_region: impl Fn(usize, usize) -> bool,
    ) -> Result<Self> {
        let inside = |px: isize, py: isize| {
            px >= 0 && py >= 0 && (px as usize) < npx && (py as usize) < npy && in_region(px as usize, py as usize)
        };
        let mut next: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        let mut edge = |from: (usize, usize), to: (usize, usize)| -> Result<()> {
            if next.insert(from, to).is_some() {
                return Err(Error::Loop(format!("plaquette region pinches at site {from:?}")));
            }
            Ok(())
        };
        for py in 0..npy {
            for px in 0..npx {
                if !in_region(px, py) {
                    continue;
                }
                let (x, y) = (px as isize, py as isize);
                if !inside(x, y - 1) {
                    edge((px, py), (px + 1, py))?;
                }
                if !inside(x + 1, y) {
                    edge((px + 1, py), (px + 1, py + 1))?;
                }
                if !inside(x, y + 1) {
                    edge((px + 1, py + 1), (px, py + 1))?;
                }
                if !inside(x - 1, y) {
                    edge((px, py + 1), (px, py))?;
                }
            }
        }
        let start = *next
            .keys()
            .min_by_key(|&&(x, y)| (y, x))
            .ok_or_else(|| Error::Loop("empty plaquette region".into()))?;
        let mut sites = vec![start];
        let mut cur = next[&start];
        while cur != start {
            sites.push(cur);
            cur = *next
                .get(&cur)
                .ok_or_else(|| Error::Loop("open plaquette boundary".into()))?;
            if sites.len() > next.len() {
                return Err(Error::Loop("plaquette boundary does not close".into()));
            }
        }
        if sites.len() != next.len() {
            return Err(Error::Loop("plaquette region has more than one boundary component".into()));
        }
        Self::from_sites(sites)
    }

    pub fn sites(&self) -> &[(usize, usize)] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Traversed links with orientation sign: +1 when the loop runs along
    /// the link direction (tail to head), -1 otherwise.
    pub fn signed_links(&self) -> impl Iterator<Item = (LinkRef, f64)> + '_ {
        let n = self.sites.len();
        (0..n).map(move |k| {
            let (a, b) = (self.sites[k], self.sites[(k + 1) % n]);
            if a.1 == b.1 {
                let ix = a.0.min(b.0);
                let sign = if b.0 > a.0 { 1.0 } else { -1.0 };
                (LinkRef { axis: Axis::X, ix, iy: a.1 }, sign)
            } else {
                let iy = a.1.min(b.1);
                let sign = if b.1 > a.1 { 1.0 } else { -1.0 };
                (LinkRef { axis: Axis::Y, ix: a.0, iy }, sign)
            }
        })
    }
}

/// Total winding of `lp` around `point` (site units), by summing the
/// wrapped polar-angle increments between consecutive loop sites.
pub fn winding_number(lp: &Loop, point: (f64, f64)) -> f64 {
    let s = lp.sites();
    let angle = |p: (usize, usize)| (p.1 as f64 - point.1).atan2(p.0 as f64 - point.0);
    let mut total = 0.0;
    for k in 0..s.len() {
        let mut d = angle(s[(k + 1) % s.len()]) - angle(s[k]);
        while d > PI {
            d -= 2.0 * PI;
        }
        while d <= -PI {
            d += 2.0 * PI;
        }
        total += d;
    }
    total / (2.0 * PI)
}

/// A masked 2D lattice with its boundary and homology data.
#[derive(Clone, Debug)]
pub struct Domain {
    nx: usize,
    ny: usize,
    dx: f64,
    active: Vec<bool>,
    holes: Vec<Hole>,
    boundary_sites: Vec<(usize, usize)>,
    outer_rim: Vec<(usize, usize)>,
    generator_loops: Vec<Loop>,
    boundary_distance: Vec<u32>,
    n_active: usize,
}

const MIN_SIZE: usize = 4;

impl Domain {
    /// Rectangle of `nx` by `ny` sites with rectangular holes.
    pub fn build_rectangle(nx: usize, ny: usize, dx: f64, holes: &[RectHole]) -> Result<Self> {
        check_frame(nx, ny, dx)?;
        for (k, h) in holes.iter().enumerate() {
            if h.width == 0 || h.height == 0 {
                return Err(Error::Domain(format!("hole {k} is empty")));
            }
            if h.x0 == 0 || h.y0 == 0 || h.x0 + h.width >= nx || h.y0 + h.height >= ny {
                return Err(Error::Domain(format!(
                    "hole {k} {h:?} touches or crosses the outer frame"
                )));
            }
        }
        for i in 0..holes.len() {
            for j in i + 1..holes.len() {
                let (a, b) = (holes[i], holes[j]);
                // Holes need at least one active site between them in the 8-neighbor sense.
                let sep_x = a.x0 > b.x0 + b.width || b.x0 > a.x0 + a.width;
                let sep_y = a.y0 > b.y0 + b.height || b.y0 > a.y0 + a.height;
                if !(sep_x || sep_y) {
                    return Err(Error::Domain(format!("holes {i} and {j} overlap or touch")));
                }
            }
        }
        let mut active = vec![true; nx * ny];
        for iy in 0..ny {
            for ix in 0..nx {
                if holes.iter().any(|h| h.contains(ix, iy)) {
                    active[iy * nx + ix] = false;
                }
            }
        }
        let shapes: Vec<HoleShape> = holes.iter().map(|&h| HoleShape::Rect(h)).collect();
        let loops_for = |d: &Domain, hole: &Hole| -> Result<Loop> {
            match hole.shape {
                HoleShape::Rect(h) => Loop::rectangle(h.x0 - 1, h.y0 - 1, h.x0 + h.width, h.y0 + h.height)
                    .and_then(|lp| d.check_loop(lp)),
                HoleShape::Disc { .. } => unreachable!(),
            }
        };
        Self::assemble(nx, ny, dx, active, shapes, loops_for)
    }

    /// Corbino annulus on an `n` by `n` grid: sites whose distance from the
    /// grid center lies in `[r_inner, r_outer]` (lengths) are active.
    pub fn build_corbino(n: usize, dx: f64, r_inner: f64, r_outer: f64) -> Result<Self> {
        check_frame(n, n, dx)?;
        let half = n as f64 * dx / 2.0;
        if !(r_inner > 0.0 && r_inner < r_outer && r_outer <= half) {
            return Err(Error::Domain(format!(
                "radii must satisfy 0 < r_inner < r_outer <= {half}, got r_inner = {r_inner}, r_outer = {r_outer}"
            )));
        }
        let c = (n as f64 - 1.0) / 2.0;
        let dist = |ix: usize, iy: usize| (ix as f64 - c).hypot(iy as f64 - c) * dx;
        let mut active = vec![false; n * n];
        let mut hole_cells = 0;
        for iy in 0..n {
            for ix in 0..n {
                let r = dist(ix, iy);
                active[iy * n + ix] = r >= r_inner && r <= r_outer;
                if r < r_inner {
                    hole_cells += 1;
                }
            }
        }
        if hole_cells == 0 {
            return Err(Error::Domain(format!(
                "inner radius {r_inner} contains no lattice site; the hole would be empty"
            )));
        }
        prune_isolated(n, n, &mut active);
        let r_in = r_inner / dx;
        let r_out = r_outer / dx;
        let shapes = vec![HoleShape::Disc {
            cx: c,
            cy: c,
            radius: r_in,
        }];
        let loops_for = move |d: &Domain, _hole: &Hole| -> Result<Loop> {
            d.disc_loop((c, c), 0.5 * (r_in + r_out))
        };
        Self::assemble(n, n, dx, active, shapes, loops_for)
    }

    fn assemble(
        nx: usize,
        ny: usize,
        dx: f64,
        active: Vec<bool>,
        shapes: Vec<HoleShape>,
        loops_for: impl Fn(&Domain, &Hole) -> Result<Loop>,
    ) -> Result<Self> {
        let n_active = active.iter().filter(|&&a| a).count();
        let mut d = Domain {
            nx,
            ny,
            dx,
            active,
            holes: Vec::new(),
            boundary_sites: Vec::new(),
            outer_rim: Vec::new(),
            generator_loops: Vec::new(),
            boundary_distance: Vec::new(),
            n_active,
        };
        for iy in 0..ny {
            for ix in 0..nx {
                if d.is_active(ix, iy) && d.active_neighbors(ix, iy).next().is_none() {
                    return Err(Error::Domain(format!("site ({ix}, {iy}) is isolated")));
                }
            }
        }

        let (labels, enclosed) = d.label_inactive();
        if enclosed.len() != shapes.len() {
            return Err(Error::Domain(format!(
                "expected {} enclosed holes, found {}",
                shapes.len(),
                enclosed.len()
            )));
        }
        // Match each shape to the enclosed component containing its center.
        let mut holes = Vec::with_capacity(shapes.len());
        for shape in shapes {
            let probe = match shape {
                HoleShape::Rect(h) => (h.x0, h.y0),
                HoleShape::Disc { cx, cy, .. } => (cx.round() as usize, cy.round() as usize),
            };
            let label = labels[probe.1 * nx + probe.0];
            let cells = enclosed
                .iter()
                .find(|(l, _)| Some(*l) == label)
                .map(|(_, c)| c.clone())
                .ok_or_else(|| Error::Domain(format!("hole {shape:?} is not enclosed")))?;
            let m = cells.len() as f64;
            let centroid = (
                cells.iter().map(|c| c.0 as f64).sum::<f64>() / m,
                cells.iter().map(|c| c.1 as f64).sum::<f64>() / m,
            );
            holes.push(Hole {
                shape,
                cells,
                centroid,
            });
        }
        d.holes = holes;

        let enclosed_labels: Vec<usize> = enclosed.iter().map(|(l, _)| *l).collect();
        for iy in 0..ny {
            for ix in 0..nx {
                if !d.is_active(ix, iy) {
                    continue;
                }
                let mut touches_outer = false;
                let mut touches_any = false;
                for (dxn, dyn_) in [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)] {
                    let (x, y) = (ix as isize + dxn, iy as isize + dyn_);
                    if x < 0 || y < 0 || x >= nx as isize || y >= ny as isize {
                        touches_outer = true;
                        touches_any = true;
                        continue;
                    }
                    let k = y as usize * nx + x as usize;
                    if !d.active[k] {
                        touches_any = true;
                        if let Some(l) = labels[k] {
                            if !enclosed_labels.contains(&l) {
                                touches_outer = true;
                            }
                        }
                    }
                }
                if touches_any {
                    d.boundary_sites.push((ix, iy));
                }
                if touches_outer {
                    d.outer_rim.push((ix, iy));
                }
            }
        }
        d.boundary_distance = d.distance_from(&d.boundary_sites);

        let mut loops = Vec::with_capacity(d.holes.len());
        for hole in &d.holes {
            loops.push(loops_for(&d, hole)?);
        }
        for (k, lp) in loops.iter().enumerate() {
            for (h, hole) in d.holes.iter().enumerate() {
                let w = winding_number(lp, hole.centroid).round() as i64;
                let expect = i64::from(h == k);
                if w != expect {
                    return Err(Error::Domain(format!(
                        "generator loop {k} winds {w} times around hole {h}"
                    )));
                }
            }
        }
        d.generator_loops = loops;
        Ok(d)
    }

    /// Labels 8-connected inactive components. Returns per-cell labels and
    /// the enclosed components (those not touching the frame) with their cells.
    #[allow(clippy::type_complexity)]
    fn label_inactive(&self) -> (Vec<Option<usize>>, Vec<(usize, Vec<(usize, usize)>)>) {
        let (nx, ny) = (self.nx, self.ny);
        let mut labels: Vec<Option<usize>> = vec![None; nx * ny];
        let mut enclosed = Vec::new();
        let mut next_label = 0;
        for start in 0..nx * ny {
            if self.active[start] || labels[start].is_some() {
                continue;
            }
            let label = next_label;
            next_label += 1;
            labels[start] = Some(label);
            let mut queue = VecDeque::from([start]);
            let mut cells = Vec::new();
            let mut touches_frame = false;
            while let Some(k) = queue.pop_front() {
                let (ix, iy) = (k % nx, k / nx);
                cells.push((ix, iy));
                if ix == 0 || iy == 0 || ix + 1 == nx || iy + 1 == ny {
                    touches_frame = true;
                }
                for dyn_ in -1isize..=1 {
                    for dxn in -1isize..=1 {
                        let (x, y) = (ix as isize + dxn, iy as isize + dyn_);
                        if x < 0 || y < 0 || x >= nx as isize || y >= ny as isize {
                            continue;
                        }
                        let kk = y as usize * nx + x as usize;
                        if !self.active[kk] && labels[kk].is_none() {
                            labels[kk] = Some(label);
                            queue.push_back(kk);
                        }
                    }
                }
            }
            if !touches_frame {
                cells.sort_by_key(|&(x, y)| (y, x));
                enclosed.push((label, cells));
            }
        }
        (labels, enclosed)
    }

    /// Counter-clockwise loop bounding the plaquettes whose centers lie within
    /// `radius` (site units) of `center`. All of its links must be active.
    pub fn disc_loop(&self, center: (f64, f64), radius: f64) -> Result<Loop> {
        let lp = Loop::plaquette_region_boundary(self.nx - 1, self.ny - 1, |px, py| {
            (px as f64 + 0.5 - center.0).hypot(py as f64 + 0.5 - center.1) <= radius
        })?;
        self.check_loop(lp)
    }

    /// Rejects loops that use inactive links.
    pub fn check_loop(&self, lp: Loop) -> Result<Loop> {
        for (l, _) in lp.signed_links() {
            if !self.link_active(l) {
                return Err(Error::Loop(format!("loop crosses inactive link {l:?}")));
            }
        }
        Ok(lp)
    }

    /// Graph distance (in links, through active sites) to the nearest of
    /// `sources`; `u32::MAX` for unreachable or inactive sites.
    pub fn distance_from(&self, sources: &[(usize, usize)]) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.nx * self.ny];
        let mut queue = VecDeque::new();
        for &(ix, iy) in sources {
            let k = self.site(ix, iy);
            if self.active[k] && dist[k] != 0 {
                dist[k] = 0;
                queue.push_back((ix, iy));
            }
        }
        while let Some((ix, iy)) = queue.pop_front() {
            let d = dist[self.site(ix, iy)];
            for (x, y) in self.active_neighbors(ix, iy) {
                let k = self.site(x, y);
                if dist[k] == u32::MAX {
                    dist[k] = d + 1;
                    queue.push_back((x, y));
                }
            }
        }
        dist
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Number of independent holes.
    pub fn genus(&self) -> usize {
        self.holes.len()
    }

    pub fn holes(&self) -> &[Hole] {
        &self.holes
    }

    pub fn boundary_sites(&self) -> &[(usize, usize)] {
        &self.boundary_sites
    }

    /// Boundary sites adjacent to the outer frame or the exterior region.
    pub fn outer_rim(&self) -> &[(usize, usize)] {
        &self.outer_rim
    }

    /// Boundary sites adjacent to hole `h`.
    pub fn hole_rim(&self, h: usize) -> Vec<(usize, usize)> {
        let cells = &self.holes[h].cells;
        self.boundary_sites
            .iter()
            .copied()
            .filter(|&(ix, iy)| {
                [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)].iter().any(|&(a, b)| {
                    let (x, y) = (ix as isize + a, iy as isize + b);
                    x >= 0 && y >= 0 && cells.binary_search_by_key(&(y as usize, x as usize), |&(cx, cy)| (cy, cx)).is_ok()
                })
            })
            .collect()
    }

    pub fn generator_loops(&self) -> &[Loop] {
        &self.generator_loops
    }

    /// Graph distance of each site to the nearest boundary site.
    pub fn boundary_distance(&self) -> &[u32] {
        &self.boundary_distance
    }

    pub fn n_active(&self) -> usize {
        self.n_active
    }

    /// Sample area: active site count times dx².
    pub fn area(&self) -> f64 {
        self.n_active as f64 * self.dx * self.dx
    }

    pub fn n_sites(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn site(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    #[inline]
    pub fn is_active(&self, ix: usize, iy: usize) -> bool {
        self.active[iy * self.nx + ix]
    }

    pub fn active_mask(&self) -> &[bool] {
        &self.active
    }

    pub fn active_neighbors(&self, ix: usize, iy: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cand = [
            (ix + 1 < self.nx).then(|| (ix + 1, iy)),
            (ix > 0).then(|| (ix.wrapping_sub(1), iy)),
            (iy + 1 < self.ny).then(|| (ix, iy + 1)),
            (iy > 0).then(|| (ix, iy.wrapping_sub(1))),
        ];
        cand.into_iter().flatten().filter(|&(x, y)| self.is_active(x, y))
    }

    /// Index of horizontal link `(ix, iy) -> (ix + 1, iy)`.
    #[inline]
    pub fn hlink(&self, ix: usize, iy: usize) -> usize {
        iy * (self.nx - 1) + ix
    }

    /// Index of vertical link `(ix, iy) -> (ix, iy + 1)`.
    #[inline]
    pub fn vlink(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn n_hlinks(&self) -> usize {
        (self.nx - 1) * self.ny
    }

    pub fn n_vlinks(&self) -> usize {
        self.nx * (self.ny - 1)
    }

    #[inline]
    pub fn hlink_active(&self, ix: usize, iy: usize) -> bool {
        self.is_active(ix, iy) && self.is_active(ix + 1, iy)
    }

    #[inline]
    pub fn vlink_active(&self, ix: usize, iy: usize) -> bool {
        self.is_active(ix, iy) && self.is_active(ix, iy + 1)
    }

    pub fn link_active(&self, l: LinkRef) -> bool {
        match l.axis {
            Axis::X => l.ix + 1 < self.nx && l.iy < self.ny && self.hlink_active(l.ix, l.iy),
            Axis::Y => l.ix < self.nx && l.iy + 1 < self.ny && self.vlink_active(l.ix, l.iy),
        }
    }

    #[inline]
    pub fn plaquette(&self, px: usize, py: usize) -> usize {
        py * (self.nx - 1) + px
    }

    pub fn n_plaquettes(&self) -> usize {
        (self.nx - 1) * (self.ny - 1)
    }

    #[inline]
    pub fn plaquette_active(&self, px: usize, py: usize) -> bool {
        self.is_active(px, py)
            && self.is_active(px + 1, py)
            && self.is_active(px, py + 1)
            && self.is_active(px + 1, py + 1)
    }

    /// Geometric center of the grid in site units.
    pub fn center(&self) -> (f64, f64) {
        ((self.nx as f64 - 1.0) / 2.0, (self.ny as f64 - 1.0) / 2.0)
    }

    /// Whether two domains describe the same lattice.
    pub fn same_lattice(&self, other: &Domain) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.dx == other.dx && self.active == other.active
    }
}

fn check_frame(nx: usize, ny: usize, dx: f64) -> Result<()> {
    if nx < MIN_SIZE || ny < MIN_SIZE {
        return Err(Error::Domain(format!("grid must be at least {MIN_SIZE}x{MIN_SIZE}, got {nx}x{ny}")));
    }
    if !(dx.is_finite() && dx > 0.0) {
        return Err(Error::Domain(format!("lattice spacing must be positive, got {dx}")));
    }
    Ok(())
}

/// Removes active sites without active 4-neighbors until none remain.
fn prune_isolated(nx: usize, ny: usize, active: &mut [bool]) {
    loop {
        let mut changed = false;
        for iy in 0..ny {
            for ix in 0..nx {
                if !active[iy * nx + ix] {
                    continue;
                }
                let has = (ix + 1 < nx && active[iy * nx + ix + 1])
                    || (ix > 0 && active[iy * nx + ix - 1])
                    || (iy + 1 < ny && active[(iy + 1) * nx + ix])
                    || (iy > 0 && active[(iy - 1) * nx + ix]);
                if !has {
                    active[iy * nx + ix] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simply_connected_rectangle() {
        let d = Domain::build_rectangle(8, 8, 1.0, &[]).unwrap();
        assert_eq!(d.genus(), 0);
        assert!(d.generator_loops().is_empty());
        // Outer frame only: 4*8 - 4 sites.
        assert_eq!(d.boundary_sites().len(), 28);
    }

    #[test]
    fn single_hole() {
        let d = Domain::build_rectangle(16, 16, 1.0, &[RectHole::new(6, 6, 4, 4)]).unwrap();
        assert_eq!(d.genus(), 1);
        assert_eq!(d.generator_loops().len(), 1);
        // Frame (60) plus the 4x4 hole rim (16).
        assert_eq!(d.boundary_sites().len(), 60 + 16);
        assert_eq!(d.hole_rim(0).len(), 16);
        assert_eq!(d.outer_rim().len(), 60);
    }

    #[test]
    fn hole_touching_frame_rejected() {
        let err = Domain::build_rectangle(16, 16, 1.0, &[RectHole::new(0, 4, 3, 3)]);
        assert!(matches!(err, Err(Error::Domain(_))));
        let err = Domain::build_rectangle(16, 16, 1.0, &[RectHole::new(12, 4, 4, 3)]);
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn overlapping_or_touching_holes_rejected() {
        let overlap = [RectHole::new(3, 3, 4, 4), RectHole::new(5, 5, 4, 4)];
        assert!(Domain::build_rectangle(16, 16, 1.0, &overlap).is_err());
        let corner = [RectHole::new(3, 3, 3, 3), RectHole::new(6, 6, 3, 3)];
        assert!(Domain::build_rectangle(16, 16, 1.0, &corner).is_err());
        let separated = [RectHole::new(3, 3, 3, 3), RectHole::new(7, 7, 3, 3)];
        assert_eq!(Domain::build_rectangle(16, 16, 1.0, &separated).unwrap().genus(), 2);
    }

    #[test]
    fn tiny_grid_rejected() {
        assert!(Domain::build_rectangle(3, 8, 1.0, &[]).is_err());
        assert!(Domain::build_rectangle(8, 8, 0.0, &[]).is_err());
    }

    #[test]
    fn corbino_genus_and_errors() {
        let d = Domain::build_corbino(32, 1.0, 5.0, 14.0).unwrap();
        assert_eq!(d.genus(), 1);
        assert_eq!(d.generator_loops().len(), 1);
        // Inner radius smaller than the closest site distance: empty hole.
        assert!(Domain::build_corbino(32, 1.0, 0.5, 14.0).is_err());
        assert!(Domain::build_corbino(32, 1.0, 15.0, 14.0).is_err());
        assert!(Domain::build_corbino(32, 1.0, 5.0, 16.5).is_err());
        assert!(Domain::build_corbino(32, 1.0, 0.0, 14.0).is_err());
    }

    #[test]
    fn corbino_loop_near_mid_radius() {
        let d = Domain::build_corbino(32, 1.0, 5.0, 14.0).unwrap();
        let c = d.center();
        for &(x, y) in d.generator_loops()[0].sites() {
            let r = (x as f64 - c.0).hypot(y as f64 - c.1);
            assert!((r - 9.5).abs() < 1.5, "loop site at radius {r}");
        }
    }

    #[test]
    fn rectangle_loop_is_ccw() {
        let lp = Loop::rectangle(1, 1, 4, 3).unwrap();
        assert_eq!(lp.len(), 10);
        assert!((winding_number(&lp, (2.5, 2.0)) - 1.0).abs() < 1e-12);
        assert!(winding_number(&lp, (6.0, 2.0)).abs() < 1e-12);
    }

    #[test]
    fn plaquette_boundary_matches_rectangle() {
        let lp = Loop::plaquette_region_boundary(10, 10, |px, py| (2..5).contains(&px) && (3..5).contains(&py))
            .unwrap();
        let rect = Loop::rectangle(2, 3, 5, 5).unwrap();
        assert_eq!(lp, rect);
    }

    #[test]
    fn pinched_region_rejected() {
        let r = Loop::plaquette_region_boundary(6, 6, |px, py| (px, py) == (1, 1) || (px, py) == (2, 2));
        assert!(r.is_err());
    }

    #[test]
    fn non_neighbor_loop_rejected() {
        assert!(Loop::from_sites(vec![(0, 0), (1, 0), (2, 1), (0, 1)]).is_err());
    }

    #[test]
    fn boundary_distance_counts_links() {
        let d = Domain::build_rectangle(9, 9, 1.0, &[]).unwrap();
        let dist = d.boundary_distance();
        assert_eq!(dist[d.site(0, 0)], 0);
        assert_eq!(dist[d.site(1, 1)], 1);
        assert_eq!(dist[d.site(4, 4)], 4);
    }
}

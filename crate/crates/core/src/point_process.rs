//! Planar point-process samplers on rectangular windows.
//!
//! Every sampler is a pure function of its parameters, the window and the
//! random stream it is handed. Points are stored in generation order; all
//! consumers in this crate are permutation invariant.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::error::{domain, ensure_nonneg, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Squared Euclidean distance. Hard-core checks compare this against
    /// `r_min * r_min` so that the separation guarantee is exact.
    #[inline]
    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        self.dist2(other).sqrt()
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.dist(&Point::ORIGIN)
    }
}

/// Axis-aligned rectangular sampling window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || x_min >= x_max || y_min >= y_max {
            return Err(domain(format!(
                "window [{x_min}, {x_max}] x [{y_min}, {y_max}] must have x_min < x_max and y_min < y_max"
            )));
        }
        Ok(Window { x_min, x_max, y_min, y_max })
    }

    /// The square `[-half, half]^2`.
    pub fn centered_square(half: f64) -> Result<Self> {
        Window::new(-half, half, -half, half)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn y_min(&self) -> f64 {
        self.y_min
    }
    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// Grows the window by `margin` on every side.
    pub fn dilate(&self, margin: f64) -> Window {
        Window {
            x_min: self.x_min - margin,
            x_max: self.x_max + margin,
            y_min: self.y_min - margin,
            y_max: self.y_max + margin,
        }
    }

    fn uniform_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        Point {
            x: self.x_min + self.width() * rng.random::<f64>(),
            y: self.y_min + self.height() * rng.random::<f64>(),
        }
    }
}

/// A finite set of points observed inside a window.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    points: Vec<Point>,
    window: Window,
}

impl PointPattern {
    pub fn empty(window: Window) -> Self {
        PointPattern { points: Vec::new(), window }
    }

    /// Builds a pattern, rejecting points outside the window.
    pub fn new(points: Vec<Point>, window: Window) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !window.contains(p)) {
            return Err(Error::Usage(format!("point ({}, {}) lies outside the window", p.x, p.y)));
        }
        Ok(PointPattern { points, window })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    /// Smallest pairwise distance, or `None` for fewer than two points.
    pub fn min_pairwise_distance(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                let d2 = a.dist2(b);
                best = Some(best.map_or(d2, |m| m.min(d2)));
            }
        }
        best.map(f64::sqrt)
    }
}

/// Location-dependent intensity functions for the inhomogeneous PPP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntensityFamily {
    Constant { lambda0: f64 },
    /// `lambda0 * exp(-(|x| - ring_radius)^2 / (2 width^2))`, an annulus of
    /// nodes around a cell edge.
    GaussianRing { lambda0: f64, ring_radius: f64, width: f64 },
    /// `lambda0 * exp(-|x - center|^2 / (2 width^2))`.
    GaussianBump { lambda0: f64, center: Point, width: f64 },
}

impl IntensityFamily {
    pub fn intensity_at(&self, p: &Point) -> f64 {
        match *self {
            IntensityFamily::Constant { lambda0 } => lambda0,
            IntensityFamily::GaussianRing { lambda0, ring_radius, width } => {
                let dr = p.norm() - ring_radius;
                lambda0 * (-dr * dr / (2.0 * width * width)).exp()
            }
            IntensityFamily::GaussianBump { lambda0, center, width } => {
                lambda0 * (-p.dist2(&center) / (2.0 * width * width)).exp()
            }
        }
    }

    /// Upper bound of the intensity anywhere in the plane, used as the
    /// dominating rate for rejection sampling.
    pub fn supremum(&self) -> Result<f64> {
        let lambda0 = match *self {
            IntensityFamily::Constant { lambda0 } => lambda0,
            IntensityFamily::GaussianRing { lambda0, ring_radius, width } => {
                ensure_nonneg("ring_radius", ring_radius)?;
                positive_width(width)?;
                lambda0
            }
            IntensityFamily::GaussianBump { lambda0, center, width } => {
                if !(center.x.is_finite() && center.y.is_finite()) {
                    return Err(domain("bump center must be finite"));
                }
                positive_width(width)?;
                lambda0
            }
        };
        if lambda0.is_infinite() {
            return Err(domain("intensity is unbounded on the window"));
        }
        ensure_nonneg("lambda0", lambda0)?;
        Ok(lambda0)
    }
}

fn positive_width(width: f64) -> Result<()> {
    if width.is_finite() && width > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("intensity width must be > 0, got {width}")))
    }
}

/// One tier's point-process family and parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessSpec {
    HomogeneousPpp { lambda: f64 },
    InhomogeneousPpp { family: IntensityFamily },
    MaternHardCore { lambda_parent: f64, r_min: f64 },
    MaternCluster { lambda_parent: f64, mean_daughters: f64, cluster_radius: f64 },
    ThomasCluster { lambda_parent: f64, mean_daughters: f64, sigma: f64 },
}

impl ProcessSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ProcessSpec::HomogeneousPpp { lambda } => ensure_nonneg("lambda", lambda),
            ProcessSpec::InhomogeneousPpp { family } => family.supremum().map(|_| ()),
            ProcessSpec::MaternHardCore { lambda_parent, r_min } => {
                ensure_nonneg("lambda_parent", lambda_parent)?;
                ensure_nonneg("r_min", r_min)
            }
            ProcessSpec::MaternCluster { lambda_parent, mean_daughters, cluster_radius } => {
                ensure_nonneg("lambda_parent", lambda_parent)?;
                ensure_nonneg("mu", mean_daughters)?;
                ensure_nonneg("cluster_radius", cluster_radius)
            }
            ProcessSpec::ThomasCluster { lambda_parent, mean_daughters, sigma } => {
                ensure_nonneg("lambda_parent", lambda_parent)?;
                ensure_nonneg("mu", mean_daughters)?;
                ensure_nonneg("sigma", sigma)
            }
        }
    }

    /// Mean number of points per unit area for the stationary families.
    pub fn mean_intensity(&self) -> Option<f64> {
        match *self {
            ProcessSpec::HomogeneousPpp { lambda } => Some(lambda),
            ProcessSpec::InhomogeneousPpp { family: IntensityFamily::Constant { lambda0 } } => {
                Some(lambda0)
            }
            ProcessSpec::InhomogeneousPpp { .. } => None,
            ProcessSpec::MaternHardCore { lambda_parent, r_min } => {
                Some(matern_retained_intensity(lambda_parent, r_min))
            }
            ProcessSpec::MaternCluster { lambda_parent, mean_daughters, .. }
            | ProcessSpec::ThomasCluster { lambda_parent, mean_daughters, .. } => {
                Some(lambda_parent * mean_daughters)
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, window: &Window, rng: &mut R) -> Result<PointPattern> {
        self.sample_with_anchors(window, &[], rng)
    }

    /// Samples the process given that `anchors` are points of it.
    ///
    /// Only the hard-core family reacts to anchors: an anchor behaves as a
    /// parent carrying the smallest possible mark, so no sampled point lies
    /// closer than `r_min` to it. Poisson-based families are unaffected,
    /// which matches their reduced Palm distribution.
    pub fn sample_with_anchors<R: Rng + ?Sized>(
        &self,
        window: &Window,
        anchors: &[Point],
        rng: &mut R,
    ) -> Result<PointPattern> {
        match *self {
            ProcessSpec::HomogeneousPpp { lambda } => sample_ppp(lambda, window, rng),
            ProcessSpec::InhomogeneousPpp { family } => sample_inhomogeneous_ppp(&family, window, rng),
            ProcessSpec::MaternHardCore { lambda_parent, r_min } => {
                sample_matern_hardcore_anchored(lambda_parent, r_min, window, anchors, rng)
            }
            ProcessSpec::MaternCluster { .. } | ProcessSpec::ThomasCluster { .. } => {
                sample_cluster(self, window, rng)
            }
        }
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<usize> {
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| domain(format!("Poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng) as usize)
}

/// Homogeneous PPP: Poisson(`lambda * area`) points, i.i.d. uniform.
pub fn sample_ppp<R: Rng + ?Sized>(lambda: f64, window: &Window, rng: &mut R) -> Result<PointPattern> {
    ensure_nonneg("lambda", lambda)?;
    let n = poisson_count(lambda * window.area(), rng)?;
    let points = (0..n).map(|_| window.uniform_point(rng)).collect();
    Ok(PointPattern { points, window: *window })
}

/// Inhomogeneous PPP by thinning a dominating homogeneous PPP with
/// retention `lambda(x) / lambda_max`.
pub fn sample_inhomogeneous_ppp<R: Rng + ?Sized>(
    family: &IntensityFamily,
    window: &Window,
    rng: &mut R,
) -> Result<PointPattern> {
    let lambda_max = family.supremum()?;
    let dominating = sample_ppp(lambda_max, window, rng)?;
    let points = dominating
        .points
        .into_iter()
        .filter(|p| rng.random::<f64>() * lambda_max < family.intensity_at(p))
        .collect();
    Ok(PointPattern { points, window: *window })
}

/// Intensity of Matérn type-II retained points:
/// `(1 - exp(-lambda_parent * pi * r^2)) / (pi * r^2)`.
pub fn matern_retained_intensity(lambda_parent: f64, r_min: f64) -> f64 {
    let a = std::f64::consts::PI * r_min * r_min;
    if a == 0.0 {
        lambda_parent
    } else {
        -(-lambda_parent * a).exp_m1() / a
    }
}

/// Parent intensity whose Matérn type-II thinning retains `target` points
/// per unit area. Requires `target * pi * r_min^2 < 1`.
pub fn matern_parent_for_intensity(target: f64, r_min: f64) -> Result<f64> {
    ensure_nonneg("target intensity", target)?;
    ensure_nonneg("r_min", r_min)?;
    let a = std::f64::consts::PI * r_min * r_min;
    if a == 0.0 {
        return Ok(target);
    }
    let fill = target * a;
    if fill >= 1.0 {
        return Err(domain(format!(
            "intensity {target} unreachable with r_min {r_min}: supremum is {}",
            1.0 / a
        )));
    }
    Ok(-(-fill).ln_1p() / a)
}

/// Matérn type-II hard-core process.
pub fn sample_matern_hardcore<R: Rng + ?Sized>(
    lambda_parent: f64,
    r_min: f64,
    window: &Window,
    rng: &mut R,
) -> Result<PointPattern> {
    sample_matern_hardcore_anchored(lambda_parent, r_min, window, &[], rng)
}

/// Matérn type-II thinning with fixed anchor points that always win the
/// mark competition.
///
/// Parents are drawn on the window dilated by `r_min`, each with a uniform
/// mark; a parent inside the window survives iff no other parent and no
/// anchor lies strictly closer than `r_min` with a smaller mark.
pub fn sample_matern_hardcore_anchored<R: Rng + ?Sized>(
    lambda_parent: f64,
    r_min: f64,
    window: &Window,
    anchors: &[Point],
    rng: &mut R,
) -> Result<PointPattern> {
    ensure_nonneg("lambda_parent", lambda_parent)?;
    ensure_nonneg("r_min", r_min)?;
    if r_min == 0.0 {
        return sample_ppp(lambda_parent, window, rng);
    }
    let outer = window.dilate(r_min);
    let parents = sample_ppp(lambda_parent, &outer, rng)?.points;
    let marks: Vec<f64> = parents.iter().map(|_| rng.random::<f64>()).collect();

    let r2 = r_min * r_min;
    let grid = CellGrid::build(&outer, r_min, &parents);
    let points = parents
        .iter()
        .enumerate()
        .filter(|&(i, p)| {
            window.contains(p)
                && anchors.iter().all(|a| a.dist2(p) >= r2)
                && !grid.any_neighbour(p, |j| j != i && marks[j] < marks[i] && parents[j].dist2(p) < r2)
        })
        .map(|(_, p)| *p)
        .collect();
    Ok(PointPattern { points, window: *window })
}

/// Cluster processes (Matérn cluster or Thomas). Parents are sampled on the
/// window dilated by the cluster radius (Matérn) or `4 sigma` (Thomas);
/// only daughters inside the window are kept.
pub fn sample_cluster<R: Rng + ?Sized>(
    spec: &ProcessSpec,
    window: &Window,
    rng: &mut R,
) -> Result<PointPattern> {
    spec.validate()?;
    enum Scatter {
        Disk(f64),
        Gauss(f64),
    }
    let (lambda_parent, mu, scatter) = match *spec {
        ProcessSpec::MaternCluster { lambda_parent, mean_daughters, cluster_radius } => {
            (lambda_parent, mean_daughters, Scatter::Disk(cluster_radius))
        }
        ProcessSpec::ThomasCluster { lambda_parent, mean_daughters, sigma } => {
            (lambda_parent, mean_daughters, Scatter::Gauss(sigma))
        }
        _ => return Err(Error::Usage("sample_cluster needs a cluster process".into())),
    };
    let margin = match scatter {
        Scatter::Disk(radius) => radius,
        Scatter::Gauss(sigma) => 4.0 * sigma,
    };
    let parents = sample_ppp(lambda_parent, &window.dilate(margin), rng)?.points;
    let normal = match scatter {
        Scatter::Gauss(sigma) if sigma > 0.0 => {
            Some(Normal::new(0.0, sigma).map_err(|e| domain(format!("sigma: {e}")))?)
        }
        _ => None,
    };

    let mut points = Vec::new();
    for parent in &parents {
        let n = poisson_count(mu, rng)?;
        for _ in 0..n {
            let (dx, dy) = match (&scatter, &normal) {
                (Scatter::Disk(radius), _) => {
                    let rho = radius * rng.random::<f64>().sqrt();
                    let phi = std::f64::consts::TAU * rng.random::<f64>();
                    (rho * phi.cos(), rho * phi.sin())
                }
                (Scatter::Gauss(_), Some(normal)) => (normal.sample(rng), normal.sample(rng)),
                (Scatter::Gauss(_), None) => (0.0, 0.0),
            };
            let daughter = Point::new(parent.x + dx, parent.y + dy);
            if window.contains(&daughter) {
                points.push(daughter);
            }
        }
    }
    Ok(PointPattern { points, window: *window })
}

/// Union of patterns sharing one window, concatenated in argument order.
pub fn superpose(patterns: &[PointPattern]) -> Result<PointPattern> {
    let Some(first) = patterns.first() else {
        return Err(Error::Usage("superpose needs at least one pattern".into()));
    };
    let window = first.window;
    if patterns.iter().any(|p| p.window != window) {
        return Err(Error::Usage("superposed patterns must share one window".into()));
    }
    let points = patterns.iter().flat_map(|p| p.points.iter().copied()).collect();
    Ok(PointPattern { points, window })
}

/// Independent thinning: each point survives with probability `q`.
pub fn thin<R: Rng + ?Sized>(pattern: &PointPattern, q: f64, rng: &mut R) -> Result<PointPattern> {
    if !(0.0..=1.0).contains(&q) {
        return Err(domain(format!("retention probability must lie in [0, 1], got {q}")));
    }
    let points = pattern.points.iter().copied().filter(|_| rng.random::<f64>() < q).collect();
    Ok(PointPattern { points, window: pattern.window })
}

/// Bucket grid with cells at least `reach` wide, so every neighbour within
/// `reach` sits in the 3x3 block around a point's cell.
struct CellGrid {
    x0: f64,
    y0: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    head: Vec<usize>,
    next: Vec<usize>,
}

const NONE: usize = usize::MAX;
const MAX_CELLS_PER_AXIS: f64 = 2048.0;

impl CellGrid {
    fn build(area: &Window, reach: f64, points: &[Point]) -> Self {
        // At most ~16 cells per point keeps the bucket array O(n).
        let occupancy = (area.area() / (16 * points.len().max(1)) as f64).sqrt();
        let cell = reach
            .max(occupancy)
            .max(area.width() / MAX_CELLS_PER_AXIS)
            .max(area.height() / MAX_CELLS_PER_AXIS);
        let nx = ((area.width() / cell).ceil() as usize).max(1);
        let ny = ((area.height() / cell).ceil() as usize).max(1);
        let mut grid = CellGrid {
            x0: area.x_min,
            y0: area.y_min,
            cell,
            nx,
            ny,
            head: vec![NONE; nx * ny],
            next: vec![NONE; points.len()],
        };
        for (i, p) in points.iter().enumerate().rev() {
            let (cx, cy) = grid.cell_of(p);
            let slot = cy * nx + cx;
            grid.next[i] = grid.head[slot];
            grid.head[slot] = i;
        }
        grid
    }

    fn cell_of(&self, p: &Point) -> (usize, usize) {
        let cx = (((p.x - self.x0) / self.cell).floor().max(0.0) as usize).min(self.nx - 1);
        let cy = (((p.y - self.y0) / self.cell).floor().max(0.0) as usize).min(self.ny - 1);
        (cx, cy)
    }

    fn any_neighbour(&self, p: &Point, mut hit: impl FnMut(usize) -> bool) -> bool {
        let (cx, cy) = self.cell_of(p);
        for y in cy.saturating_sub(1)..=(cy + 1).min(self.ny - 1) {
            for x in cx.saturating_sub(1)..=(cx + 1).min(self.nx - 1) {
                let mut cur = self.head[y * self.nx + x];
                while cur != NONE {
                    if hit(cur) {
                        return true;
                    }
                    cur = self.next[cur];
                }
            }
        }
        false
    }
}

//! Finite-size scaling: data collapse of `y(p, L) = F((p − p_c) L^{1/ν})`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub p: f64,
    pub size: usize,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseResult {
    pub p_c: f64,
    pub nu: f64,
    pub quality: f64,
    pub pc_range: (f64, f64),
    pub nu_range: (f64, f64),
    pub grid: (usize, usize),
}

pub const GRID_POINTS: usize = 41;
const MIN_SIZES: usize = 3;
const MIN_POINTS_PER_SIZE: usize = 5;

struct Curve {
    size: f64,
    points: Vec<ScalingPoint>,
}

fn curves(points: &[ScalingPoint]) -> Vec<Curve> {
    let mut sizes: Vec<usize> = points.iter().map(|p| p.size).collect();
    sizes.sort_unstable();
    sizes.dedup();
    sizes
        .into_iter()
        .map(|size| {
            let mut pts: Vec<ScalingPoint> = points.iter().copied().filter(|p| p.size == size).collect();
            pts.sort_by(|a, b| a.p.total_cmp(&b.p));
            Curve { size: size as f64, points: pts }
        })
        .collect()
}

fn check_input(points: &[ScalingPoint]) -> Result<Vec<Curve>> {
    if points.iter().any(|p| !(p.p.is_finite() && p.mean.is_finite() && p.stderr.is_finite() && p.stderr >= 0.0)) {
        return Err(Error::Analysis("non-finite scaling data".into()));
    }
    let cs = curves(points);
    if cs.len() < MIN_SIZES {
        return Err(Error::Analysis(format!("collapse needs {MIN_SIZES} sizes, got {}", cs.len())));
    }
    if let Some(c) = cs.iter().find(|c| c.points.len() < MIN_POINTS_PER_SIZE) {
        return Err(Error::Analysis(format!(
            "size {} has {} points, collapse needs {MIN_POINTS_PER_SIZE}",
            c.size,
            c.points.len()
        )));
    }
    Ok(cs)
}

fn badness(curves: &[Curve], p_c: f64, nu: f64) -> f64 {
    if nu <= 0.0 || !nu.is_finite() {
        return f64::INFINITY;
    }
    let weighted = curves.iter().flat_map(|c| &c.points).any(|p| p.stderr > 0.0);
    let scaled: Vec<Vec<(f64, f64, f64)>> = curves
        .iter()
        .map(|c| {
            let s = c.size.powf(1.0 / nu);
            c.points.iter().map(|p| ((p.p - p_c) * s, p.mean, p.stderr)).collect()
        })
        .collect();
    let total: usize = scaled.iter().map(Vec::len).sum();
    let mut sum = 0.0;
    let mut terms = 0usize;
    for (ci, curve) in scaled.iter().enumerate() {
        for &(x, y, dy) in curve {
            for (cj, other) in scaled.iter().enumerate() {
                if ci == cj || x < other[0].0 || x > other[other.len() - 1].0 {
                    continue;
                }
                let k = other.partition_point(|q| q.0 <= x).clamp(1, other.len() - 1);
                let (x0, y0, d0) = other[k - 1];
                let (x1, y1, d1) = other[k];
                let t = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
                let interp = y0 + t * (y1 - y0);
                let var = (1.0 - t).powi(2) * d0 * d0 + t * t * d1 * d1;
                let denom = if weighted { dy * dy + var + 1e-12 } else { 1.0 };
                sum += (y - interp).powi(2) / denom;
                terms += 1;
            }
        }
    }
    if 2 * terms < total {
        return f64::INFINITY;
    }
    sum / terms as f64
}

/// Collapse badness at `(p_c, ν)`: mean squared deviation of every rescaled
/// point from the piecewise-linear interpolation of each other size,
/// weighted by the combined standard errors. Infinite when the rescaled
/// curves overlap too little.
pub fn collapse_quality(points: &[ScalingPoint], p_c: f64, nu: f64) -> f64 {
    badness(&curves(points), p_c, nu)
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| if n == 1 { lo } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
}

/// Grid search over the box followed by Nelder–Mead refinement confined to it.
pub fn fss_collapse(points: &[ScalingPoint], pc_range: (f64, f64), nu_range: (f64, f64)) -> Result<CollapseResult> {
    let cs = check_input(points)?;
    for (name, (lo, hi)) in [("p_c", pc_range), ("nu", nu_range)] {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Analysis(format!("invalid {name} range [{lo}, {hi}]")));
        }
    }
    if nu_range.0 <= 0.0 {
        return Err(Error::Analysis("nu range must be positive".into()));
    }
    let mut best = (pc_range.0, nu_range.0, f64::INFINITY);
    for p_c in linspace(pc_range.0, pc_range.1, GRID_POINTS) {
        for nu in linspace(nu_range.0, nu_range.1, GRID_POINTS) {
            let q = badness(&cs, p_c, nu);
            if q < best.2 {
                best = (p_c, nu, q);
            }
        }
    }
    if !best.2.is_finite() {
        return Err(Error::Analysis("no parameters in range give overlapping curves".into()));
    }
    let inside = |v: [f64; 2]| {
        (pc_range.0..=pc_range.1).contains(&v[0]) && (nu_range.0..=nu_range.1).contains(&v[1])
    };
    let step = |(lo, hi): (f64, f64)| if hi > lo { (hi - lo) / (GRID_POINTS - 1) as f64 } else { 0.0 };
    let (x, q) = nelder_mead(
        |v| if inside(v) { badness(&cs, v[0], v[1]) } else { f64::INFINITY },
        [best.0, best.1],
        [step(pc_range), step(nu_range)],
        500,
        1e-12,
    );
    let (p_c, nu, quality) = if q <= best.2 { (x[0], x[1], q) } else { best };
    Ok(CollapseResult { p_c, nu, quality, pc_range, nu_range, grid: (GRID_POINTS, GRID_POINTS) })
}

/// Two-dimensional Nelder–Mead minimiser. Returns the best vertex, whose
/// value never exceeds `f(start)`.
pub fn nelder_mead<F: Fn([f64; 2]) -> f64>(f: F, start: [f64; 2], step: [f64; 2], max_iter: usize, tol: f64) -> ([f64; 2], f64) {
    let mut simplex = [start, [start[0] + step[0], start[1]], [start[0], start[1] + step[1]]];
    let mut values = simplex.map(&f);
    let comb = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    for _ in 0..max_iter {
        let mut order = [0, 1, 2];
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.map(|k| simplex[k]);
        values = order.map(|k| values[k]);
        if values[2].is_finite() && (values[2] - values[0]).abs() <= tol * (1.0 + values[0].abs()) {
            break;
        }
        let centroid = comb(simplex[0], simplex[1], 0.5);
        let reflected = comb(centroid, simplex[2], -1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = comb(centroid, simplex[2], -2.0);
            let fe = f(expanded);
            (simplex[2], values[2]) = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < values[1] {
            (simplex[2], values[2]) = (reflected, fr);
        } else {
            let contracted = if fr < values[2] { comb(centroid, reflected, 0.5) } else { comb(centroid, simplex[2], 0.5) };
            let fc = f(contracted);
            if fc < values[2].min(fr) {
                (simplex[2], values[2]) = (contracted, fc);
            } else {
                for k in 1..3 {
                    simplex[k] = comb(simplex[0], simplex[k], 0.5);
                    values[k] = f(simplex[k]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    (simplex[best], values[best])
}

/// Where consecutive sizes' curves cross, one estimate per size pair.
/// Curves are compared at shared probability values and the first sign
/// change of their difference is located by linear interpolation.
pub fn crossings(points: &[ScalingPoint]) -> Result<Vec<f64>> {
    let cs = curves(points);
    if cs.len() < 2 {
        return Err(Error::Analysis("crossing needs two sizes".into()));
    }
    let mut out = Vec::new();
    for pair in cs.windows(2) {
        let diff: Vec<(f64, f64)> = pair[0]
            .points
            .iter()
            .filter_map(|a| {
                pair[1].points.iter().find(|b| (b.p - a.p).abs() < 1e-9).map(|b| (a.p, b.mean - a.mean))
            })
            .collect();
        let root = diff.windows(2).find_map(|w| {
            let ((p0, d0), (p1, d1)) = (w[0], w[1]);
            if d0 == 0.0 {
                Some(p0)
            } else if d0 * d1 < 0.0 {
                Some(p0 + (p1 - p0) * d0 / (d0 - d1))
            } else {
                None
            }
        });
        match root {
            Some(p) => out.push(p),
            None => {
                return Err(Error::Analysis(format!(
                    "curves for L = {} and L = {} do not cross",
                    pair[0].size, pair[1].size
                )))
            }
        }
    }
    Ok(out)
}

/// Mean of [`crossings`].
pub fn crossing_estimate(points: &[ScalingPoint]) -> Result<f64> {
    let xs = crossings(points)?;
    Ok(xs.iter().sum::<f64>() / xs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(p_c: f64, nu: f64, noise: f64) -> Vec<ScalingPoint> {
        let mut pts = Vec::new();
        for size in [32usize, 64, 128, 256] {
            for k in 0..15 {
                let p = 0.3 + 0.4 * k as f64 / 14.0;
                let x = (p - p_c) * (size as f64).powf(1.0 / nu);
                let wobble = noise * ((k * 7 + size) as f64).sin();
                pts.push(ScalingPoint { p, size, mean: 1.0 / (1.0 + (x / 4.0).exp()) + wobble, stderr: noise });
            }
        }
        pts
    }

    #[test]
    fn recovers_synthetic_parameters() {
        let pts = synthetic(0.5, 4.0 / 3.0, 0.0);
        let r = fss_collapse(&pts, (0.4, 0.6), (0.5, 3.0)).unwrap();
        assert!((r.p_c - 0.5).abs() < 0.025, "{r:?}");
        assert!((r.nu - 4.0 / 3.0).abs() < 4.0 / 3.0 * 0.05, "{r:?}");
        assert!(r.quality < 1e-4);
    }

    #[test]
    fn refinement_never_worsens_grid_optimum() {
        let pts = synthetic(0.47, 1.1, 0.01);
        let r = fss_collapse(&pts, (0.4, 0.6), (0.5, 3.0)).unwrap();
        let mut grid_best = f64::INFINITY;
        for p in linspace(0.4, 0.6, GRID_POINTS) {
            for nu in linspace(0.5, 3.0, GRID_POINTS) {
                grid_best = grid_best.min(collapse_quality(&pts, p, nu));
            }
        }
        assert!(r.quality <= grid_best);
        assert!((0.4..=0.6).contains(&r.p_c));
        let again = fss_collapse(&pts, (0.4, 0.6), (0.5, 3.0)).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn insufficient_data() {
        let pts: Vec<_> = synthetic(0.5, 1.0, 0.0).into_iter().filter(|p| p.size != 32 && p.size != 64).collect();
        assert!(matches!(fss_collapse(&pts, (0.4, 0.6), (0.5, 2.0)), Err(Error::Analysis(_))));
        let sparse: Vec<_> = synthetic(0.5, 1.0, 0.0).into_iter().filter(|p| p.size != 32 || p.p < 0.4).collect();
        assert!(matches!(fss_collapse(&sparse, (0.4, 0.6), (0.5, 2.0)), Err(Error::Analysis(_))));
    }

    #[test]
    fn crossing_of_synthetic_curves() {
        let pts = synthetic(0.5, 1.0, 0.0);
        let p = crossing_estimate(&pts).unwrap();
        assert!((p - 0.5).abs() < 1e-9, "{p}");
    }

    #[test]
    fn nelder_mead_on_quadratic() {
        let (x, v) = nelder_mead(|v| (v[0] - 1.0).powi(2) + 3.0 * (v[1] + 2.0).powi(2), [0.0, 0.0], [0.5, 0.5], 1000, 1e-16);
        assert!((x[0] - 1.0).abs() < 1e-5 && (x[1] + 2.0).abs() < 1e-5 && v < 1e-9);
    }
}

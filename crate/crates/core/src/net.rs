//! Extraction of the net {z : Im b(z) = 0} by marching squares on a
//! log-polar grid, which resolves the star structure at both 0 and infinity.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::symbol::Symbol;

#[derive(Clone, Copy, Debug)]
pub struct NetWindow {
    pub ln_rho_min: f64,
    pub ln_rho_max: f64,
}

/// Polyline approximation of the net inside the window; points are complex
/// plane coordinates.
#[derive(Clone, Debug)]
pub struct NetPlot {
    pub window: NetWindow,
    pub polylines: Vec<Vec<Complex64>>,
}

/// Window from the root moduli of z^r b(z) at lambda = 0, padded by a factor
/// of two on each side.
pub fn default_window(b: &Symbol) -> Result<NetWindow> {
    let c = crate::roots::shifted_poly(b, Complex64::new(0.0, 0.0));
    let rts = crate::roots::roots(&c, 1e-12)?;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for z in &rts {
        lo = lo.min(z.norm());
        hi = hi.max(z.norm());
    }
    if !lo.is_finite() || hi <= 0.0 {
        lo = 0.5;
        hi = 2.0;
    }
    Ok(NetWindow { ln_rho_min: (lo / 2.0).ln(), ln_rho_max: (hi * 2.0).ln() })
}

/// Marching-squares contour extraction of Im b = 0.
///
/// `grid` is (radial nodes, angular nodes). Vertices are refined by bisection
/// along the crossing grid edge until |Im b| <= 1e-10 * local coefficient
/// scale.
pub fn compute_net(
    b: &Symbol,
    window: Option<NetWindow>,
    grid: (usize, usize),
) -> Result<NetPlot> {
    let (nu, nt) = grid;
    if nu < 2 || nt < 2 {
        return Err(Error::BadScanParams("grid must be at least 2x2".into()));
    }
    let win = match window {
        Some(w) => w,
        None => default_window(b)?,
    };
    if !(win.ln_rho_max > win.ln_rho_min) {
        return Err(Error::BadScanParams("degenerate window".into()));
    }

    let du = (win.ln_rho_max - win.ln_rho_min) / (nu - 1) as f64;
    let dt = 2.0 * std::f64::consts::PI / (nt - 1) as f64;
    let u_at = |i: usize| win.ln_rho_min + du * i as f64;
    let t_at = |j: usize| -std::f64::consts::PI + dt * j as f64;
    let field = |u: f64, t: f64| -> f64 {
        let z = Complex64::from_polar(u.exp(), t);
        b.eval(z).map(|v| v.im).unwrap_or(f64::NAN)
    };

    // sample the grid (rows parallel)
    let values: Vec<Vec<f64>> = (0..nu)
        .into_par_iter()
        .map(|i| (0..nt).map(|j| field(u_at(i), t_at(j))).collect())
        .collect();

    // refine a zero crossing along a grid edge by bisection
    let refine = |u0: f64, t0: f64, u1: f64, t1: f64, f0: f64, f1: f64| -> (f64, f64) {
        let (mut a, mut fa) = ((u0, t0), f0);
        let (mut c, mut _fc) = ((u1, t1), f1);
        for _ in 0..60 {
            let mid = (0.5 * (a.0 + c.0), 0.5 * (a.1 + c.1));
            let fm = field(mid.0, mid.1);
            let scale: f64 = b
                .terms()
                .map(|(k, ak)| ak.norm() * (mid.0 * k as f64).exp())
                .sum::<f64>()
                .max(1e-300);
            if fm.abs() <= 1e-10 * scale {
                return mid;
            }
            if (fm >= 0.0) == (fa >= 0.0) {
                a = mid;
                fa = fm;
            } else {
                c = mid;
                _fc = fm;
            }
        }
        (0.5 * (a.0 + c.0), 0.5 * (a.1 + c.1))
    };

    // edge ids: radial edge (i,j)-(i+1,j) -> (i, j, 0); angular (i,j)-(i,j+1) -> (i, j, 1).
    // The columns at theta = -pi and theta = pi are the same ray, so radial
    // edges at j = nt-1 are identified with j = 0; curves encircling the
    // origin then chain across the seam.
    let mut vertex_of_edge: HashMap<(usize, usize, u8), usize> = HashMap::new();
    let mut vertices: Vec<(f64, f64)> = Vec::new();
    let mut segments: Vec<(usize, usize)> = Vec::new();

    let positive = |v: f64| v >= 0.0;
    let mut get_vertex = |i: usize, j: usize, dir: u8, values: &Vec<Vec<f64>>| -> usize {
        let j = if dir == 0 && j == nt - 1 { 0 } else { j };
        if let Some(&v) = vertex_of_edge.get(&(i, j, dir)) {
            return v;
        }
        let (p0, p1, f0, f1) = match dir {
            0 => ((u_at(i), t_at(j)), (u_at(i + 1), t_at(j)), values[i][j], values[i + 1][j]),
            _ => ((u_at(i), t_at(j)), (u_at(i), t_at(j + 1)), values[i][j], values[i][j + 1]),
        };
        let p = refine(p0.0, p0.1, p1.0, p1.1, f0, f1);
        vertices.push(p);
        vertex_of_edge.insert((i, j, dir), vertices.len() - 1);
        vertices.len() - 1
    };

    for i in 0..nu - 1 {
        for j in 0..nt - 1 {
            let c00 = positive(values[i][j]);
            let c10 = positive(values[i + 1][j]);
            let c01 = positive(values[i][j + 1]);
            let c11 = positive(values[i + 1][j + 1]);
            // collect crossed edges of this cell
            let mut crossed: Vec<(usize, usize, u8)> = Vec::new();
            if c00 != c10 {
                crossed.push((i, j, 0)); // left radial edge
            }
            if c01 != c11 {
                crossed.push((i, j + 1, 0)); // right radial edge
            }
            if c00 != c01 {
                crossed.push((i, j, 1)); // bottom angular edge
            }
            if c10 != c11 {
                crossed.push((i + 1, j, 1)); // top angular edge
            }
            match crossed.len() {
                2 => {
                    let a = get_vertex(crossed[0].0, crossed[0].1, crossed[0].2, &values);
                    let b_ = get_vertex(crossed[1].0, crossed[1].1, crossed[1].2, &values);
                    segments.push((a, b_));
                }
                4 => {
                    // saddle: disambiguate with the center sample
                    let uc = 0.5 * (u_at(i) + u_at(i + 1));
                    let tc = 0.5 * (t_at(j) + t_at(j + 1));
                    let center = positive(field(uc, tc));
                    let vs: Vec<usize> = crossed
                        .iter()
                        .map(|&(a, b_, d)| get_vertex(a, b_, d, &values))
                        .collect();
                    // crossed order: [left, right, bottom, top]
                    if center == c00 {
                        segments.push((vs[0], vs[3]));
                        segments.push((vs[2], vs[1]));
                    } else {
                        segments.push((vs[0], vs[2]));
                        segments.push((vs[3], vs[1]));
                    }
                }
                _ => {}
            }
        }
    }

    // chain segments into polylines
    let mut adj: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for (sid, &(a, b_)) in segments.iter().enumerate() {
        adj.entry(a).or_default().push((sid, b_));
        adj.entry(b_).or_default().push((sid, a));
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();
    for start_sid in 0..segments.len() {
        if used[start_sid] {
            continue;
        }
        used[start_sid] = true;
        let (a, b_) = segments[start_sid];
        let mut chain = vec![a, b_];
        // extend forward
        loop {
            let tail = *chain.last().unwrap();
            let next = adj
                .get(&tail)
                .and_then(|l| l.iter().find(|(sid, _)| !used[*sid]).copied());
            match next {
                Some((sid, other)) => {
                    used[sid] = true;
                    chain.push(other);
                }
                None => break,
            }
        }
        // extend backward
        loop {
            let head = chain[0];
            let next = adj
                .get(&head)
                .and_then(|l| l.iter().find(|(sid, _)| !used[*sid]).copied());
            match next {
                Some((sid, other)) => {
                    used[sid] = true;
                    chain.insert(0, other);
                }
                None => break,
            }
        }
        polylines.push(
            chain
                .into_iter()
                .map(|v| {
                    let (u, t) = vertices[v];
                    Complex64::from_polar(u.exp(), t)
                })
                .collect(),
        );
    }
    Ok(NetPlot { window: win, polylines })
}

/// Does the net inside the window separate the inner boundary circle from
/// the outer one?
///
/// A path from 0 to infinity that avoids the net must stay inside a region
/// where Im b keeps one sign, so the test flood-fills the strictly-positive
/// and strictly-negative node sets and asks whether either connects the
/// inner radial ring to the outer one. Blocked both ways means every such
/// path crosses the net — the window contains a closed barrier encircling
/// the origin.
pub fn jordan_barrier(
    b: &Symbol,
    window: Option<NetWindow>,
    grid: (usize, usize),
) -> Result<bool> {
    let (nu, nt) = grid;
    if nu < 4 || nt < 4 {
        return Err(Error::BadScanParams("grid must be at least 4x4".into()));
    }
    let win = match window {
        Some(w) => w,
        None => default_window(b)?,
    };
    let du = (win.ln_rho_max - win.ln_rho_min) / (nu - 1) as f64;
    let m = nt - 1; // distinct angular columns (theta wraps)
    let dt = 2.0 * std::f64::consts::PI / m as f64;
    let values: Vec<Vec<f64>> = (0..nu)
        .into_par_iter()
        .map(|i| {
            let u = win.ln_rho_min + du * i as f64;
            let scale: f64 = b
                .terms()
                .map(|(k, ak)| ak.norm() * (u * k as f64).exp())
                .sum::<f64>()
                .max(1e-300);
            (0..m)
                .map(|j| {
                    let t = -std::f64::consts::PI + dt * j as f64;
                    let z = Complex64::from_polar(u.exp(), t);
                    let v = b.eval(z).map(|v| v.im).unwrap_or(f64::NAN);
                    v / scale
                })
                .collect()
        })
        .collect();

    let connects = |want_positive: bool| -> bool {
        let open = |i: usize, j: usize| -> bool {
            let v = values[i][j];
            if want_positive {
                v > 1e-9
            } else {
                v < -1e-9
            }
        };
        let mut seen = vec![false; nu * m];
        let mut queue = std::collections::VecDeque::new();
        for j in 0..m {
            if open(0, j) {
                seen[j] = true;
                queue.push_back((0usize, j));
            }
        }
        while let Some((i, j)) = queue.pop_front() {
            if i == nu - 1 {
                return true;
            }
            let nbrs = [
                (i.wrapping_sub(1), j),
                (i + 1, j),
                (i, (j + 1) % m),
                (i, (j + m - 1) % m),
            ];
            for (ni, nj) in nbrs {
                if ni < nu && open(ni, nj) && !seen[ni * m + nj] {
                    seen[ni * m + nj] = true;
                    queue.push_back((ni, nj));
                }
            }
        }
        false
    };
    Ok(!connects(true) && !connects(false))
}

/// Winding number of a closed polyline about the origin (0 when the line is
/// far from closing).
pub fn polyline_winding(points: &[Complex64]) -> i32 {
    if points.len() < 3 {
        return 0;
    }
    let closes = (points[0] - points[points.len() - 1]).norm()
        < 0.05 * (1.0 + points[0].norm());
    if !closes {
        return 0;
    }
    let mut total = 0.0;
    for w in points.windows(2) {
        let cross = w[0].re * w[1].im - w[0].im * w[1].re;
        let dot = w[0].re * w[1].re + w[0].im * w[1].im;
        total += cross.atan2(dot);
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiag_net_contains_axis_and_circle() {
        let b = Symbol::new_int(&[(-1, 1), (1, 1)]).unwrap();
        let net = compute_net(&b, None, (257, 257)).unwrap();
        let all: Vec<Complex64> = net.polylines.iter().flatten().copied().collect();
        assert!(!all.is_empty());
        // every vertex is on the net
        for z in &all {
            let v = b.eval(*z).unwrap();
            assert!(v.im.abs() <= 1e-8 * b.norm_bound() * (1.0 + z.norm_sqr()));
        }
        // the real axis shows up
        let on_axis = all.iter().filter(|z| z.im.abs() < 1e-6).count();
        assert!(on_axis > 50, "axis points: {on_axis}");
        // the unit circle shows up at many angles
        let on_circle = all
            .iter()
            .filter(|z| (z.norm() - 1.0).abs() < 1e-6 && z.im.abs() > 0.05)
            .count();
        assert!(on_circle > 50, "circle points: {on_circle}");
    }

    #[test]
    fn example4_net_has_jordan_barrier() {
        // left panel of the yes/no pair: the net contains a closed component
        // encircling 0
        let b =
            Symbol::new_int(&[(-3, 1), (-2, -1), (-1, 7), (1, 9), (2, -2), (3, 2), (4, -1)])
                .unwrap();
        assert!(jordan_barrier(&b, None, (512, 512)).unwrap());
        // right panel: no Jordan curve
        let b2 = Symbol::new_int(&[
            (-3, -2),
            (-2, -4),
            (-1, 12),
            (1, 8),
            (2, -10),
            (3, 8),
            (4, -4),
        ])
        .unwrap();
        assert!(!jordan_barrier(&b2, None, (512, 512)).unwrap());
    }

    #[test]
    fn tridiag_barrier_is_the_circle() {
        let b = Symbol::new_int(&[(-1, 1), (1, 1)]).unwrap();
        assert!(jordan_barrier(&b, None, (256, 256)).unwrap());
        // trinomial outside the class: no barrier
        let t = Symbol::new_int(&[(-1, 1), (2, 1)]).unwrap();
        assert!(!jordan_barrier(&t, None, (256, 256)).unwrap());
    }

    #[test]
    fn grid_too_small_rejected() {
        let b = Symbol::new_int(&[(-1, 1), (1, 1)]).unwrap();
        assert!(matches!(
            compute_net(&b, None, (1, 50)),
            Err(Error::BadScanParams(_))
        ));
    }
}

//! Three-point distance solver, used to cross-check the two-point solver
//! when a third landmark is visible.
//!
//! Given the squared side lengths of a known world triangle and the cosines
//! between the three view rays, the law of cosines yields a system in the
//! three camera-to-point distances:
//!
//! ```text
//! x² + y² − 2xy·cos12 = q12      x ↔ point 1, y ↔ point 2
//! x² + z² − 2xz·cos13 = q13      z ↔ point 3
//! y² + z² − 2yz·cos23 = q23
//! ```
//!
//! Dividing the unknowns through by `x` turns the system into a pair of
//! conics in `(y/x, z/x)`. A pencil member of the two conics degenerates
//! into a line pair exactly at the roots of a cubic; intersecting those
//! lines with either conic recovers every solution of the original system
//! with nothing harder than a cubic and a few quadratics. Up to four
//! distance triples survive the positivity filter.
//!
//! Every returned solution is Newton-polished and certified against the
//! original equations; [`p3p_residual`] reports the worst violation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rt::Quadrance;

/// Residual bound a candidate must meet to be returned, in m².
const RESIDUAL_BOUND: f64 = 1e-8;

/// Squared world side lengths and view-ray cosines. Index pairs tie the
/// quantities together: `side_q12` spans points 1 and 2, `ray_cos12` is the
/// cosine between the rays toward points 1 and 2, and so on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct P3PInput {
    pub side_q12: Quadrance,
    pub side_q13: Quadrance,
    pub side_q23: Quadrance,
    pub ray_cos12: f64,
    pub ray_cos13: f64,
    pub ray_cos23: f64,
}

impl P3PInput {
    pub fn validate(&self) -> Result<()> {
        let (a2, b2, c2) = (
            self.side_q12.value(),
            self.side_q13.value(),
            self.side_q23.value(),
        );
        if !(a2 > 0.0 && b2 > 0.0 && c2 > 0.0) {
            return Err(Error::InvalidP3PInput("side quadrances must be positive"));
        }
        let (a, b, c) = (a2.sqrt(), b2.sqrt(), c2.sqrt());
        if a >= b + c || b >= a + c || c >= a + b {
            return Err(Error::InvalidP3PInput("world points are collinear"));
        }
        for cos in [self.ray_cos12, self.ray_cos13, self.ray_cos23] {
            if !(-1.0 < cos && cos < 1.0) {
                return Err(Error::InvalidP3PInput("ray cosines must lie in (-1, 1)"));
            }
        }
        Ok(())
    }
}

/// One distance triple with its certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct P3PSolution {
    /// Distance from the camera to point 1, meters.
    pub dist1: f64,
    pub dist2: f64,
    pub dist3: f64,
    /// Worst absolute violation of the three distance equations, m².
    pub residual: f64,
}

/// Worst absolute violation of the three law-of-cosines equations for a
/// candidate distance triple.
pub fn p3p_residual(input: &P3PInput, sol: &P3PSolution) -> f64 {
    let (x, y, z) = (sol.dist1, sol.dist2, sol.dist3);
    let r1 = x * x + y * y - 2.0 * x * y * input.ray_cos12 - input.side_q12.value();
    let r2 = x * x + z * z - 2.0 * x * z * input.ray_cos13 - input.side_q13.value();
    let r3 = y * y + z * z - 2.0 * y * z * input.ray_cos23 - input.side_q23.value();
    r1.abs().max(r2.abs()).max(r3.abs())
}

type Mat3 = [[f64; 3]; 3];

/// Conic through the `(u, v) = (y/x, z/x)` ratios obtained by eliminating
/// `x²` between equations (1,2) and (1,3); symmetric matrix form.
fn ratio_conics(input: &P3PInput) -> (Mat3, Mat3) {
    let (a2, b2, c2) = (
        input.side_q12.value(),
        input.side_q13.value(),
        input.side_q23.value(),
    );
    let (ca, cb, cg) = (input.ray_cos12, input.ray_cos13, input.ray_cos23);
    // From (1) and (3): (c2−a2)u² − a2·v² + 2a2·uv·cg − 2c2·u·ca + c2 = 0.
    let ma = [
        [c2 - a2, a2 * cg, -c2 * ca],
        [a2 * cg, -a2, 0.0],
        [-c2 * ca, 0.0, c2],
    ];
    // From (1) and (2): b2·u² − a2·v² − 2b2·u·ca + 2a2·v·cb + (b2−a2) = 0.
    let mc = [
        [b2, 0.0, -b2 * ca],
        [0.0, -a2, a2 * cb],
        [-b2 * ca, a2 * cb, b2 - a2],
    ];
    (ma, mc)
}

/// Coefficients `[k3, k2, k1, k0]` of the pencil-degeneracy cubic in λ.
/// `det(MC − λ·MA)` expands to exactly `side_q12` times this polynomial.
fn degeneracy_cubic(input: &P3PInput) -> [f64; 4] {
    let (a2, b2, c2) = (
        input.side_q12.value(),
        input.side_q13.value(),
        input.side_q23.value(),
    );
    let (ca, cb, cg) = (input.ray_cos12, input.ray_cos13, input.ray_cos23);
    let (sa2, sb2, sg2) = (1.0 - ca * ca, 1.0 - cb * cb, 1.0 - cg * cg);
    let mixed = 1.0 - ca * cb * cg;
    [
        c2 * (c2 * sa2 - a2 * sg2),
        a2 * (b2 - a2) * sg2 - c2 * (2.0 * b2 + c2) * sa2 + 2.0 * a2 * c2 * mixed,
        a2 * (a2 - c2) * sb2 + b2 * (b2 + 2.0 * c2) * sa2 - 2.0 * a2 * b2 * mixed,
        b2 * (a2 * sb2 - b2 * sa2),
    ]
}

fn solve_quadratic(a: f64, b: f64, c: f64, eps: f64) -> Vec<f64> {
    if a.abs() < eps {
        if b.abs() < eps {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    // Citardauq form on one root avoids cancellation.
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Real roots of `k[0]·λ³ + k[1]·λ² + k[2]·λ + k[3] = 0`, falling back to
/// the quadratic/linear solve when leading coefficients vanish. Each root
/// gets a Newton polish.
fn real_cubic_roots(k: [f64; 4]) -> Vec<f64> {
    let scale = k.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    let kn: Vec<f64> = k.iter().map(|c| c / scale).collect();
    let eps = 1e-12;
    let mut roots = if kn[0].abs() < eps {
        solve_quadratic(kn[1], kn[2], kn[3], eps)
    } else {
        let (b, c, d) = (kn[1] / kn[0], kn[2] / kn[0], kn[3] / kn[0]);
        let p = c - b * b / 3.0;
        let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
        let shift = b / 3.0;
        let disc = (q * 0.5) * (q * 0.5) + (p / 3.0) * (p / 3.0) * (p / 3.0);
        if disc > eps {
            let s = disc.sqrt();
            let u = cbrt(-q * 0.5 + s);
            let v = cbrt(-q * 0.5 - s);
            vec![u + v - shift]
        } else if disc.abs() <= eps {
            let u = cbrt(-q * 0.5);
            vec![2.0 * u - shift, -u - shift]
        } else {
            let r = (-p / 3.0).sqrt();
            let phi = ((-q * 0.5) / (r * r * r)).clamp(-1.0, 1.0).acos();
            let tau = 2.0 * std::f64::consts::PI;
            (0..3)
                .map(|i| 2.0 * r * ((phi + i as f64 * tau) / 3.0).cos() - shift)
                .collect()
        }
    };
    // Newton polish against the original (normalized) cubic.
    for root in &mut roots {
        for _ in 0..2 {
            let f = ((kn[0] * *root + kn[1]) * *root + kn[2]) * *root + kn[3];
            let df = (3.0 * kn[0] * *root + 2.0 * kn[1]) * *root + kn[2];
            if df.abs() > 1e-300 {
                *root -= f / df;
            }
        }
    }
    roots
}

fn cbrt(x: f64) -> f64 {
    x.signum() * x.abs().powf(1.0 / 3.0)
}

fn adjugate(m: &Mat3) -> Mat3 {
    let minor = |r: usize, c: usize| -> f64 {
        let rs: Vec<usize> = (0..3).filter(|&k| k != r).collect();
        let cs: Vec<usize> = (0..3).filter(|&k| k != c).collect();
        m[rs[0]][cs[0]] * m[rs[1]][cs[1]] - m[rs[0]][cs[1]] * m[rs[1]][cs[0]]
    };
    let mut adj = [[0.0; 3]; 3];
    for (i, row) in adj.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            // Adjugate is the transposed cofactor matrix.
            let s = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            *v = s * minor(j, i);
        }
    }
    adj
}

/// Factors a degenerate (rank ≤ 2) symmetric conic into its line pair.
/// Complex-conjugate pairs carry no real solutions and yield an empty list;
/// a rank-1 conic is a repeated line.
fn split_degenerate_conic(m: &Mat3) -> Vec<[f64; 3]> {
    let scale = m
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    let mut mn = *m;
    for row in &mut mn {
        for v in row.iter_mut() {
            *v /= scale;
        }
    }
    let adj = adjugate(&mn);
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for (i, row) in adj.iter().enumerate() {
        if -row[i] > best {
            best = -row[i];
            best_i = i;
        }
    }
    let adj_max = adj
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if best < 1e-12 {
        if adj_max < 1e-12 {
            // Rank 1: the conic is a squared line; any nonzero row is it.
            let row = (0..3)
                .max_by(|&a, &b| {
                    row_norm(&mn, a)
                        .partial_cmp(&row_norm(&mn, b))
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if row_norm(&mn, row) < 1e-12 {
                return Vec::new();
            }
            return vec![mn[row]];
        }
        // Complex-conjugate line pair: no real points beyond the vertex.
        return Vec::new();
    }
    let beta = best.sqrt();
    let p = [adj[0][best_i] / beta, adj[1][best_i] / beta, adj[2][best_i] / beta];
    // mn + [p]× has rank 1; its rows are one line, its columns the other.
    let skew = [
        [0.0, -p[2], p[1]],
        [p[2], 0.0, -p[0]],
        [-p[1], p[0], 0.0],
    ];
    let mut c = mn;
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] += skew[i][j];
        }
    }
    let ri = (0..3)
        .max_by(|&a, &b| {
            row_norm(&c, a)
                .partial_cmp(&row_norm(&c, b))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap();
    let ci = (0..3)
        .max_by(|&a, &b| {
            col_norm(&c, a)
                .partial_cmp(&col_norm(&c, b))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap();
    let g = c[ri];
    let h = [c[0][ci], c[1][ci], c[2][ci]];
    if row_norm(&c, ri) < 1e-12 || col_norm(&c, ci) < 1e-12 {
        return Vec::new();
    }
    vec![g, h]
}

fn row_norm(m: &Mat3, i: usize) -> f64 {
    m[i].iter().map(|v| v.abs()).sum()
}

fn col_norm(m: &Mat3, j: usize) -> f64 {
    (0..3).map(|i| m[i][j].abs()).sum()
}

/// Intersections of the line `l·(u, v, 1) = 0` with the conic `w^T M w = 0`.
fn line_conic_intersections(l: [f64; 3], m: &Mat3) -> Vec<(f64, f64)> {
    let eps = 1e-14;
    let mut out = Vec::new();
    if l[1].abs() >= l[0].abs() {
        if l[1].abs() < eps {
            return out;
        }
        // v = s·u + t on the line.
        let s = -l[0] / l[1];
        let t = -l[2] / l[1];
        let a = m[0][0] + 2.0 * m[0][1] * s + m[1][1] * s * s;
        let b = 2.0 * (m[0][1] * t + m[1][1] * s * t + m[0][2] + m[1][2] * s);
        let c = m[1][1] * t * t + 2.0 * m[1][2] * t + m[2][2];
        for u in solve_quadratic(a, b, c, eps) {
            out.push((u, s * u + t));
        }
    } else {
        // u = s·v + t on the line.
        let s = -l[1] / l[0];
        let t = -l[2] / l[0];
        let a = m[1][1] + 2.0 * m[0][1] * s + m[0][0] * s * s;
        let b = 2.0 * (m[0][1] * t + m[0][0] * s * t + m[1][2] + m[0][2] * s);
        let c = m[0][0] * t * t + 2.0 * m[0][2] * t + m[2][2];
        for v in solve_quadratic(a, b, c, eps) {
            out.push((s * v + t, v));
        }
    }
    out
}

/// Newton refinement of a distance triple against the full system.
fn polish(input: &P3PInput, mut x: f64, mut y: f64, mut z: f64) -> (f64, f64, f64) {
    let (a2, b2, c2) = (
        input.side_q12.value(),
        input.side_q13.value(),
        input.side_q23.value(),
    );
    let (ca, cb, cg) = (input.ray_cos12, input.ray_cos13, input.ray_cos23);
    let scale = a2.max(b2).max(c2).max(1.0);
    for _ in 0..6 {
        let f = [
            x * x + y * y - 2.0 * x * y * ca - a2,
            x * x + z * z - 2.0 * x * z * cb - b2,
            y * y + z * z - 2.0 * y * z * cg - c2,
        ];
        if f.iter().map(|v| v.abs()).fold(0.0f64, f64::max) < 1e-14 * scale {
            break;
        }
        let j = [
            [2.0 * x - 2.0 * y * ca, 2.0 * y - 2.0 * x * ca, 0.0],
            [2.0 * x - 2.0 * z * cb, 0.0, 2.0 * z - 2.0 * x * cb],
            [0.0, 2.0 * y - 2.0 * z * cg, 2.0 * z - 2.0 * y * cg],
        ];
        let Some(d) = solve3(&j, &f) else { break };
        x -= d[0];
        y -= d[1];
        z -= d[2];
    }
    (x, y, z)
}

/// Cramer solve of a 3×3 system.
fn solve3(j: &Mat3, f: &[f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &Mat3| -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(j);
    if d.abs() < 1e-300 {
        return None;
    }
    let mut out = [0.0; 3];
    for (c, slot) in out.iter_mut().enumerate() {
        let mut m = *j;
        for r in 0..3 {
            m[r][c] = f[r];
        }
        *slot = det(&m) / d;
    }
    Some(out)
}

/// All positive distance triples consistent with the input, sorted by the
/// first distance. Returns an empty list when no real solution with
/// positive distances exists.
pub fn solve_p3p(input: &P3PInput) -> Result<Vec<P3PSolution>> {
    input.validate()?;
    let (ma, mc) = ratio_conics(input);
    let cubic = degeneracy_cubic(input);
    let a2 = input.side_q12.value();
    let ca = input.ray_cos12;

    let mut found: Vec<P3PSolution> = Vec::new();
    for lambda in real_cubic_roots(cubic) {
        let mut pencil = mc;
        for i in 0..3 {
            for j in 0..3 {
                pencil[i][j] -= lambda * ma[i][j];
            }
        }
        for line in split_degenerate_conic(&pencil) {
            for (u, v) in line_conic_intersections(line, &ma) {
                let den = 1.0 + u * u - 2.0 * u * ca;
                if den <= 0.0 {
                    continue;
                }
                let x = (a2 / den).sqrt();
                let (x, y, z) = polish(input, x, u * x, v * x);
                if !(x > 0.0 && y > 0.0 && z > 0.0) {
                    continue;
                }
                let candidate = P3PSolution {
                    dist1: x,
                    dist2: y,
                    dist3: z,
                    residual: 0.0,
                };
                let residual = p3p_residual(input, &candidate);
                if residual >= RESIDUAL_BOUND {
                    continue;
                }
                let duplicate = found.iter().any(|s| {
                    (s.dist1 - x).abs() < 1e-6 * (1.0 + x.abs())
                        && (s.dist2 - y).abs() < 1e-6 * (1.0 + y.abs())
                        && (s.dist3 - z).abs() < 1e-6 * (1.0 + z.abs())
                });
                if !duplicate {
                    found.push(P3PSolution {
                        residual,
                        ..candidate
                    });
                }
            }
        }
    }
    found.sort_by(|a, b| a.dist1.partial_cmp(&b.dist1).unwrap_or(std::cmp::Ordering::Equal));
    found.truncate(4);
    Ok(found)
}

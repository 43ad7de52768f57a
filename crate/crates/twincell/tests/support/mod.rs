//! Shared oracles for the integration suites.
//!
//! Everything here is deliberately written along a different algorithmic
//! path than the library: fixed-point iteration instead of closed forms,
//! plain LU inverses applied to literal textbook formulas instead of
//! Gram-side solves and rank-one downdates, and scalar accumulation loops
//! instead of matrix products. Agreement between the two paths is the
//! evidence the tests are after.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use twincell::sim::{ChannelSet, EstimateSet};

/// Damped fixed-point iteration for the load-`beta` SINR root at
/// regularization `rho`.
pub fn damped_g_oracle(beta: f64, rho: f64) -> f64 {
    let mut g = 1.0_f64;
    for _ in 0..1_000_000 {
        let next = 1.0 / (rho + beta / (1.0 + g));
        let new = 0.5 * (g + next);
        if (new - g).abs() < 4.0 * f64::EPSILON * (1.0 + g.abs()) {
            return new;
        }
        g = new;
    }
    g
}

/// Picard iteration for the two-weight fixed point
/// `gamma = 1 / (rho + beta*w1/(1+w1*gamma) + beta*w2/(1+w2*gamma))`.
pub fn picard_gamma_oracle(beta: f64, rho: f64, w1: f64, w2: f64) -> f64 {
    let mut gamma = 1.0 / rho;
    for _ in 0..1_000_000 {
        let next = 1.0
            / (rho + beta * w1 / (1.0 + w1 * gamma) + beta * w2 / (1.0 + w2 * gamma));
        let new = 0.5 * (gamma + next);
        if (new - gamma).abs() < 4.0 * f64::EPSILON * (1.0 + gamma.abs()) {
            return new;
        }
        gamma = new;
    }
    gamma
}

/// Five-point central difference, accurate to `O(h^4)`.
pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

fn dot_row(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x * y;
    }
    acc
}

fn row_of(m: &DMatrix<Complex64>, r: usize) -> Vec<Complex64> {
    (0..m.ncols()).map(|c| m[(r, c)]).collect()
}

fn column_of(m: &DMatrix<Complex64>, c: usize) -> Vec<Complex64> {
    (0..m.nrows()).map(|r| m[(r, c)]).collect()
}

/// Textbook joint-precoder SINRs: assemble the stacked estimate matrix,
/// form the antenna-side normal equations, invert with plain LU, and
/// accumulate every gain with scalar loops.
pub fn naive_mcp_sinr(
    ch: &ChannelSet,
    est: &EstimateSet,
    alpha: f64,
    p_total: f64,
) -> [Vec<f64>; 2] {
    let (k, n) = (ch.k, ch.n);
    let mut h_hat = DMatrix::<Complex64>::zeros(2 * k, 2 * n);
    let mut h_true = DMatrix::<Complex64>::zeros(2 * k, 2 * n);
    for j in 0..2 {
        for i in 0..2 {
            for r in 0..k {
                for c in 0..n {
                    h_hat[(j * k + r, i * n + c)] = est.h_hat[j][i][(r, c)];
                    h_true[(j * k + r, i * n + c)] = ch.h[j][i][(r, c)];
                }
            }
        }
    }
    let mut m = h_hat.adjoint() * &h_hat;
    for d in 0..2 * n {
        m[(d, d)] += Complex64::new(alpha, 0.0);
    }
    let w = m.try_inverse().expect("regularized matrix invertible") * h_hat.adjoint();
    let fro2: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    let c2 = p_total / fro2;
    let mut out = [vec![0.0; k], vec![0.0; k]];
    for j in 0..2 {
        for u in 0..k {
            let hu = row_of(&h_true, j * k + u);
            let mut sig = 0.0;
            let mut intf = 0.0;
            for v in 0..2 * k {
                let gain = dot_row(&hu, &column_of(&w, v)).norm_sqr() * c2;
                if v == j * k + u {
                    sig = gain;
                } else {
                    intf += gain;
                }
            }
            out[j][u] = sig / (1.0 + intf);
        }
    }
    out
}

/// Textbook per-station SINRs. With `exclude_served` the regularized
/// matrix for user `k` literally sums every estimated row toward the
/// station except the served user's own, rebuilt from scratch per user;
/// without it the station inverts one matrix containing all of its own
/// rows. `use_cross` controls whether the neighbor cell's rows enter.
pub fn naive_perbs_sinr(
    ch: &ChannelSet,
    est: &EstimateSet,
    alpha: f64,
    p_station: f64,
    exclude_served: bool,
    use_cross: bool,
) -> [Vec<f64>; 2] {
    let (k, n) = (ch.k, ch.n);
    let mut w_all = Vec::new();
    let mut c2_all = Vec::new();
    for j in 0..2 {
        let mut beams: Vec<Vec<Complex64>> = Vec::with_capacity(k);
        for served in 0..k {
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            for cell in 0..2 {
                if cell != j && !use_cross {
                    continue;
                }
                for user in 0..k {
                    if exclude_served && cell == j && user == served {
                        continue;
                    }
                    let row = row_of(&est.h_hat[cell][j], user);
                    for a in 0..n {
                        for b in 0..n {
                            m[(a, b)] += row[a].conj() * row[b];
                        }
                    }
                }
            }
            for d in 0..n {
                m[(d, d)] += Complex64::new(alpha, 0.0);
            }
            let inv = m.try_inverse().expect("regularized matrix invertible");
            let hk = row_of(&est.h_hat[j][j], served);
            let mut beam = vec![Complex64::new(0.0, 0.0); n];
            for a in 0..n {
                for b in 0..n {
                    beam[a] += inv[(a, b)] * hk[b].conj();
                }
            }
            beams.push(beam);
        }
        let total: f64 = beams
            .iter()
            .flat_map(|b| b.iter())
            .map(|z| z.norm_sqr())
            .sum();
        c2_all.push(p_station / total);
        w_all.push(beams);
    }
    let mut out = [vec![0.0; k], vec![0.0; k]];
    for j in 0..2 {
        let o = 1 - j;
        for u in 0..k {
            let own_row = row_of(&ch.h[j][j], u);
            let cross_row = row_of(&ch.h[j][o], u);
            let mut sig = 0.0;
            let mut intf = 0.0;
            for v in 0..k {
                let g = dot_row(&own_row, &w_all[j][v]).norm_sqr() * c2_all[j];
                if v == u {
                    sig = g;
                } else {
                    intf += g;
                }
                intf += dot_row(&cross_row, &w_all[o][v]).norm_sqr() * c2_all[o];
            }
            out[j][u] = sig / (1.0 + intf);
        }
    }
    out
}

//! Finite-size feedback models: per-coefficient analog MMSE estimation and
//! random-codebook vector quantization.
//!
//! Analog feedback retransmits each channel coefficient over the uplink with
//! power controlled by the split `nu`; the receiving side applies a scalar
//! MMSE filter per coefficient. Whatever the antenna count at the receiver,
//! the matched filter collapses the observation to one scalar per
//! coefficient, so the estimate is `t/(1+t)·(b + w)` with link SNR `t` and
//! `w` of variance `var(b)/t`.
//!
//! Quantized feedback comes in two interchangeable flavors: an explicit
//! random codebook (draw `2^B` isotropic directions, keep the closest) and
//! a statistical shortcut that samples the distortion `tau^2` from its exact
//! law (the minimum of `2^B` Beta(N-1, 1) variables) and rebuilds the
//! quantized direction in the plane spanned by the channel and a uniformly
//! random orthogonal direction. Channel norms are reported losslessly in
//! both flavors.

use nalgebra::{DMatrix, DVector, RowDVector};
use num_complex::Complex64;
use rand::Rng;

use super::channel::{complex_gaussian, ChannelSet};
use crate::error::{Error, Result};

/// Largest per-link bit count accepted by the explicit quantizer.
pub const EXPLICIT_BITS_CAP: u32 = 24;

/// Channel estimates of one realization, mirroring [`ChannelSet`] layout.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateSet {
    /// `h_hat[j][i]` row `k`: estimate of user `k` in cell `j` toward BS `i`.
    pub h_hat: [[DMatrix<Complex64>; 2]; 2],
    /// Per-user quantization distortions, present in quantized mode only;
    /// `tau2[j][i][k]` matches `h_hat[j][i]` row `k`.
    pub tau2: Option<[[DVector<f64>; 2]; 2]>,
}

/// Unit-variance feedback noise for every coefficient of a realization.
pub(crate) type NoiseBlocks = [[DMatrix<Complex64>; 2]; 2];

/// Draws one unit-variance complex Gaussian per channel coefficient.
pub(crate) fn draw_unit_noise(k: usize, n: usize, rng: &mut impl Rng) -> NoiseBlocks {
    let mut make = || DMatrix::from_fn(k, n, |_, _| complex_gaussian(rng, 1.0));
    let a = make();
    let b = make();
    let c = make();
    let d = make();
    [[a, b], [c, d]]
}

/// Scalar MMSE estimation with caller-supplied unit noise.
///
/// Separating the noise draw lets allocation searches rescale one noise
/// realization across candidate splits instead of redrawing it.
pub(crate) fn analog_estimate_scaled(
    ch: &ChannelSet,
    nu: f64,
    gamma_u: f64,
    kappa: f64,
    noise: &NoiseBlocks,
) -> Result<EstimateSet> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::domain(format!("nu must lie in [0, 1], got {nu}")));
    }
    if !(gamma_u > 0.0) || !(kappa >= 1.0) {
        return Err(Error::domain(
            "gamma_u must be positive and kappa at least 1".to_string(),
        ));
    }
    let gamma_u_bar = 2.0 * gamma_u * kappa * (1.0 + ch.epsilon);
    let mut h_hat = [
        [
            DMatrix::zeros(ch.k, ch.n),
            DMatrix::zeros(ch.k, ch.n),
        ],
        [
            DMatrix::zeros(ch.k, ch.n),
            DMatrix::zeros(ch.k, ch.n),
        ],
    ];
    for j in 0..2 {
        for i in 0..2 {
            let direct = i == j;
            let t = (if direct { nu } else { 1.0 - nu }) * gamma_u_bar;
            let var = if direct { 1.0 } else { ch.epsilon };
            if t == 0.0 || var == 0.0 {
                continue;
            }
            let gain = t / (1.0 + t);
            let noise_scale = (var / t).sqrt();
            let src = &ch.h[j][i];
            let dst = &mut h_hat[j][i];
            for r in 0..ch.k {
                for c in 0..ch.n {
                    let w = noise[j][i][(r, c)] * noise_scale;
                    dst[(r, c)] = gain * (src[(r, c)] + w);
                }
            }
        }
    }
    Ok(EstimateSet { h_hat, tau2: None })
}

/// Scalar MMSE estimate of every coefficient under an uplink power split.
///
/// The effective per-coefficient SNRs are `t_d = nu·gamma_u_bar` for direct
/// links and `t_c = (1-nu)·gamma_u_bar` for cross links, with
/// `gamma_u_bar = 2·gamma_u·kappa·(1+epsilon)`. Fresh noise is drawn per
/// coefficient. A zero SNR on a link yields the MMSE estimate of an
/// unobserved coefficient: zero.
pub fn analog_feedback_estimate(
    ch: &ChannelSet,
    nu: f64,
    gamma_u: f64,
    kappa: f64,
    rng: &mut impl Rng,
) -> Result<EstimateSet> {
    let noise = draw_unit_noise(ch.k, ch.n, rng);
    analog_estimate_scaled(ch, nu, gamma_u, kappa, &noise)
}

fn unit_row(rng: &mut impl Rng, n: usize) -> RowDVector<Complex64> {
    loop {
        let mut v = RowDVector::from_fn(n, |_, _| complex_gaussian(rng, 1.0));
        let norm = v.norm();
        if norm > 0.0 {
            v /= Complex64::new(norm, 0.0);
            return v;
        }
    }
}

/// Explicit random-codebook quantization of one channel row.
///
/// Draws `2^B` isotropic unit codewords, keeps the one with the largest
/// alignment `|h·u^H|/‖h‖`, and returns `‖h‖·u` together with the squared
/// misalignment `tau^2 = 1 - cos²`. Codewords are streamed, so memory stays
/// flat in `B`, but time is exponential; budgets beyond
/// [`EXPLICIT_BITS_CAP`] bits must use [`rvq_quantize_statistical`].
pub fn rvq_quantize_explicit(
    h: &RowDVector<Complex64>,
    bits: u32,
    rng: &mut impl Rng,
) -> Result<(RowDVector<Complex64>, f64)> {
    if bits > EXPLICIT_BITS_CAP {
        return Err(Error::ExplicitBits {
            bits,
            cap: EXPLICIT_BITS_CAP,
        });
    }
    if h.len() < 2 {
        return Err(Error::domain("quantized vectors need at least 2 entries"));
    }
    let norm = h.norm();
    if norm == 0.0 {
        return Ok((h.clone(), 0.0));
    }
    let norm_sqr = norm * norm;
    let mut best_align = -1.0;
    let mut best = RowDVector::zeros(h.len());
    for _ in 0..(1u64 << bits) {
        let u = unit_row(rng, h.len());
        let align = h.dotc(&u).norm_sqr() / norm_sqr;
        if align > best_align {
            best_align = align;
            best = u;
        }
    }
    let tau2 = (1.0 - best_align).max(0.0);
    Ok((best * Complex64::new(norm, 0.0), tau2))
}

/// Distortion of a `2^B`-codeword random codebook from a uniform draw.
///
/// `tau^2 = (1 - U^{2^{-B}})^{1/(N-1)}` for `U` uniform on (0, 1]. For large
/// budgets `U^{2^{-B}}` is evaluated as `-expm1(2^{-B}·ln U)`, switching to
/// a fully logarithmic form once `2^{-B}·|ln U|` drops below 1e-12, where
/// `expm1` itself would round to its argument.
pub(crate) fn tau2_from_uniform(n: usize, bits: u32, u: f64) -> f64 {
    let exponent = 1.0 / (n as f64 - 1.0);
    let log_u = u.ln();
    if log_u == 0.0 {
        return 0.0;
    }
    let scaled = (-(bits as f64)).exp2() * log_u;
    if scaled.abs() < 1e-12 {
        // ln tau^2 = (ln(-ln U) - B·ln 2)/(N-1)
        let log_tau2 = ((-log_u).ln() - bits as f64 * std::f64::consts::LN_2) * exponent;
        log_tau2.exp()
    } else {
        (-scaled.exp_m1()).powf(exponent)
    }
}

/// Inverse-CDF sample of the distortion of a `2^B`-codeword random codebook.
pub fn sample_tau2(n: usize, bits: u32, rng: &mut impl Rng) -> f64 {
    let u: f64 = 1.0 - rng.gen::<f64>();
    tau2_from_uniform(n, bits, u)
}

/// Uniformly random unit direction orthogonal to the given unit row.
pub(crate) fn orthogonal_direction(
    dir: &RowDVector<Complex64>,
    rng: &mut impl Rng,
) -> RowDVector<Complex64> {
    loop {
        let v = RowDVector::from_fn(dir.len(), |_, _| complex_gaussian(rng, 1.0));
        let coeff = dir.dotc(&v);
        let perp = v - dir * coeff;
        let perp_norm = perp.norm();
        if perp_norm > 0.0 {
            return perp / Complex64::new(perp_norm, 0.0);
        }
    }
}

/// Quantized row with the given norm, distortion, and orthogonal direction.
pub(crate) fn assemble_quantized(
    dir: &RowDVector<Complex64>,
    z: &RowDVector<Complex64>,
    norm: f64,
    tau2: f64,
) -> RowDVector<Complex64> {
    let u = dir * Complex64::new((1.0 - tau2).sqrt(), 0.0)
        + z * Complex64::new(tau2.sqrt(), 0.0);
    u * Complex64::new(norm, 0.0)
}

/// Statistical random-codebook quantization of one channel row.
///
/// Samples the distortion from its exact law with [`sample_tau2`], then
/// rebuilds the quantized direction as
/// `u = sqrt(1-tau^2)·h/‖h‖ + tau·z` with `z` uniform on the unit sphere of
/// the orthogonal complement of `h`, so `cos²(h, u) = 1 - tau^2` holds
/// exactly. Distributionally identical to [`rvq_quantize_explicit`] at any
/// budget, but costs O(N) instead of O(2^B·N).
pub fn rvq_quantize_statistical(
    h: &RowDVector<Complex64>,
    bits: u32,
    rng: &mut impl Rng,
) -> Result<(RowDVector<Complex64>, f64)> {
    if h.len() < 2 {
        return Err(Error::domain("quantized vectors need at least 2 entries"));
    }
    let norm = h.norm();
    if norm == 0.0 {
        return Ok((h.clone(), 0.0));
    }
    let tau2 = sample_tau2(h.len(), bits, rng);
    let dir = h / Complex64::new(norm, 0.0);
    let z = orthogonal_direction(&dir, rng);
    Ok((assemble_quantized(&dir, &z, norm, tau2), tau2))
}

/// Which quantizer realizes the random codebook.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RvqMode {
    /// Enumerate the codebook; exact but exponential in bits.
    Explicit,
    /// Sample the distortion law; exact in distribution, O(N) per vector.
    Statistical,
}

/// Quantizes every link of a realization with per-link bit counts.
///
/// Direct links get `bits_direct` bits each and cross links `bits_cross`.
pub fn rvq_estimate_set(
    ch: &ChannelSet,
    bits_direct: u32,
    bits_cross: u32,
    mode: RvqMode,
    rng: &mut impl Rng,
) -> Result<EstimateSet> {
    let mut h_hat = [
        [
            DMatrix::zeros(ch.k, ch.n),
            DMatrix::zeros(ch.k, ch.n),
        ],
        [
            DMatrix::zeros(ch.k, ch.n),
            DMatrix::zeros(ch.k, ch.n),
        ],
    ];
    let mut tau2 = [
        [DVector::zeros(ch.k), DVector::zeros(ch.k)],
        [DVector::zeros(ch.k), DVector::zeros(ch.k)],
    ];
    for j in 0..2 {
        for i in 0..2 {
            let bits = if i == j { bits_direct } else { bits_cross };
            for k in 0..ch.k {
                let row = ch.row(k, j, i);
                if row.norm() == 0.0 {
                    continue;
                }
                let (q, t2) = match mode {
                    RvqMode::Explicit => rvq_quantize_explicit(&row, bits, rng)?,
                    RvqMode::Statistical => rvq_quantize_statistical(&row, bits, rng)?,
                };
                for c in 0..ch.n {
                    h_hat[j][i][(k, c)] = q[c];
                }
                tau2[j][i][k] = t2;
            }
        }
    }
    Ok(EstimateSet {
        h_hat,
        tau2: Some(tau2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::channel::draw_channels;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn analog_estimates_match_predicted_variances() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let (nu, gamma_u, kappa, epsilon) = (0.6, 1.0, 1.0, 0.5);
        let gamma_u_bar = 2.0 * gamma_u * kappa * (1.0 + epsilon);
        let mut err_d = 0.0;
        let mut err_c = 0.0;
        let mut count = 0usize;
        for _ in 0..60 {
            let ch = draw_channels(40, 25, epsilon, &mut rng);
            let est = analog_feedback_estimate(&ch, nu, gamma_u, kappa, &mut rng).unwrap();
            err_d += (&ch.h[0][0] - &est.h_hat[0][0])
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>();
            err_c += (&ch.h[0][1] - &est.h_hat[0][1])
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>();
            count += 40 * 25;
        }
        let delta_d = 1.0 / (1.0 + nu * gamma_u_bar);
        let delta_c = epsilon / (1.0 + (1.0 - nu) * gamma_u_bar);
        assert!(
            (err_d / count as f64 - delta_d).abs() / delta_d < 0.01,
            "direct error variance {} vs {delta_d}",
            err_d / count as f64
        );
        assert!(
            (err_c / count as f64 - delta_c).abs() / delta_c < 0.01,
            "cross error variance {} vs {delta_c}",
            err_c / count as f64
        );
    }

    #[test]
    fn analog_zero_split_leaves_direct_links_unobserved() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let ch = draw_channels(8, 4, 0.5, &mut rng);
        let est = analog_feedback_estimate(&ch, 0.0, 1.0, 1.0, &mut rng).unwrap();
        assert!(est.h_hat[0][0].iter().all(|z| z.norm() == 0.0));
        assert!(est.h_hat[0][1].iter().any(|z| z.norm() > 0.0));
    }

    #[test]
    fn explicit_matches_constructed_codeword() {
        // With one codeword the quantizer returns that codeword's direction;
        // aligning the channel with it gives zero distortion.
        let mut probe = ChaCha12Rng::seed_from_u64(42);
        let u = unit_row(&mut probe, 4);
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let h = u.scale(3.0);
        let (q, tau2) = rvq_quantize_explicit(&h, 0, &mut rng).unwrap();
        assert!(tau2 < 1e-15);
        assert!((q - h).norm() < 1e-12);
    }

    #[test]
    fn explicit_single_codeword_distortion_has_beta_mean() {
        let n = 4;
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let mut acc = 0.0;
        let trials = 100_000;
        for _ in 0..trials {
            let h = unit_row(&mut rng, n).scale(1.0);
            let (_, tau2) = rvq_quantize_explicit(&h, 0, &mut rng).unwrap();
            acc += tau2;
        }
        let mean = acc / trials as f64;
        let expected = (n as f64 - 1.0) / n as f64;
        assert!(
            (mean - expected).abs() / expected < 0.01,
            "mean {mean} vs Beta expectation {expected}"
        );
    }

    #[test]
    fn explicit_rejects_oversized_budgets() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let h = unit_row(&mut rng, 4);
        assert!(matches!(
            rvq_quantize_explicit(&h, 25, &mut rng),
            Err(Error::ExplicitBits { bits: 25, cap: 24 })
        ));
    }

    #[test]
    fn statistical_identity_is_exact_per_sample() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..200 {
            let h = unit_row(&mut rng, 6).scale(2.5);
            let (q, tau2) = rvq_quantize_statistical(&h, 5, &mut rng).unwrap();
            assert!((q.norm() - h.norm()).abs() < 1e-12, "norm must be preserved");
            let cos2 = h.dotc(&q).norm_sqr() / (h.norm_squared() * q.norm_squared());
            assert!((cos2 - (1.0 - tau2)).abs() < 1e-12);
        }
    }

    #[test]
    fn statistical_distortion_vanishes_with_budget() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let mut acc = 0.0;
        for _ in 0..500 {
            acc += sample_tau2(4, 40, &mut rng);
        }
        assert!(acc / 500.0 < 1e-3);
        // The logarithmic branch keeps extreme budgets finite and positive.
        let t = sample_tau2(4, 200, &mut rng);
        assert!(t > 0.0 && t < 1e-15);
    }

    #[test]
    fn explicit_and_statistical_means_agree_at_small_budget() {
        let n = 4;
        let bits = 8;
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let trials = 20_000;
        let mut explicit = 0.0;
        for _ in 0..trials {
            let h = unit_row(&mut rng, n);
            explicit += rvq_quantize_explicit(&h, bits, &mut rng).unwrap().1;
        }
        let mut statistical = 0.0;
        for _ in 0..trials {
            statistical += sample_tau2(n, bits, &mut rng);
        }
        let (e, s) = (explicit / trials as f64, statistical / trials as f64);
        assert!((e - s).abs() / s < 0.02, "explicit {e} vs statistical {s}");
    }
}

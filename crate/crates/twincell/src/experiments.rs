//! Parameter sweeps and feedback-budget comparisons.
//!
//! A sweep walks one variable over a grid, optimizes every transmit scheme
//! at each point with the asymptotic formulas, and emits flat rows carrying
//! the optimum itself plus every intermediate quantity (error variances,
//! effective SNR, interference fixed point, regularization) so a plotted
//! anomaly can be traced without rerunning anything. Sweeps can attach a
//! Monte Carlo cross-check per point. Comparisons put analog and quantized
//! feedback side by side under a common uplink budget, where the bit budget
//! either follows the uplink capacity or a fixed modulation efficiency.
//!
//! Inputs accept SNRs in dB and convert once at the boundary; every
//! internal computation is linear.
//!
//! ## Example
//!
//! ```
//! use twincell::experiments::{run_sweep, FeedbackKind, SweepSpec, SweepVariable, SystemParams};
//!
//! let spec = SweepSpec {
//!     variable: SweepVariable::Epsilon,
//!     start: 0.2,
//!     stop: 0.6,
//!     step: 0.2,
//!     fixed: SystemParams::default(),
//!     feedback: FeedbackKind::Analog,
//!     mc: None,
//! };
//! let table = run_sweep(&spec).unwrap();
//! assert_eq!(table.rows.len(), 3);
//! assert!(table.failures.is_empty());
//! ```

use rayon::prelude::*;

use crate::analog::{self, AnalogParams};
use crate::digital::{self, DigitalParams};
use crate::error::{Error, Result};
use crate::sim::{self, Feedback, RvqMode, Scheme, SimConfig};
use crate::solver::{solve_gamma, GammaParams};

/// Swept variable of a parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Cross-channel gain.
    Epsilon,
    /// Antennas per station; affects only the Monte Carlo columns.
    NAntennas,
    /// Total per-antenna feedback bit budget.
    BtBar,
    /// Uplink channel uses per coefficient.
    Kappa,
}

impl std::fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SweepVariable::Epsilon => "epsilon",
            SweepVariable::NAntennas => "n",
            SweepVariable::BtBar => "bt_bar",
            SweepVariable::Kappa => "kappa",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "epsilon" | "eps" => Ok(SweepVariable::Epsilon),
            "n" | "n_antennas" | "n-antennas" => Ok(SweepVariable::NAntennas),
            "bt_bar" | "bt-bar" | "bt" => Ok(SweepVariable::BtBar),
            "kappa" => Ok(SweepVariable::Kappa),
            other => Err(Error::config(format!("unknown sweep variable `{other}`"))),
        }
    }
}

/// Which feedback model a sweep analyzes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeedbackKind {
    /// Uplink retransmission with an optimized power split.
    Analog,
    /// Random-codebook quantization with an optimized bit split.
    Rvq,
}

impl std::fmt::Display for FeedbackKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FeedbackKind::Analog => "analog",
            FeedbackKind::Rvq => "rvq",
        })
    }
}

impl std::str::FromStr for FeedbackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "analog" => Ok(FeedbackKind::Analog),
            "rvq" | "digital" | "quantized" => Ok(FeedbackKind::Rvq),
            other => Err(Error::config(format!("unknown feedback kind `{other}`"))),
        }
    }
}

/// Scenario parameters held fixed during a sweep, SNRs in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Users per antenna.
    pub beta: f64,
    /// Cross-channel gain.
    pub epsilon: f64,
    /// Downlink SNR in dB.
    pub gamma_d_db: f64,
    /// Uplink SNR in dB.
    pub gamma_u_db: f64,
    /// Uplink channel uses per channel coefficient.
    pub kappa: f64,
    /// Total per-antenna feedback bits.
    pub bt_bar: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            beta: 0.6,
            epsilon: 0.5,
            gamma_d_db: 10.0,
            gamma_u_db: 0.0,
            kappa: 1.0,
            bt_bar: 4.0,
        }
    }
}

impl SystemParams {
    /// Downlink SNR in linear scale.
    pub fn gamma_d(&self) -> f64 {
        10f64.powf(self.gamma_d_db / 10.0)
    }

    /// Uplink SNR in linear scale.
    pub fn gamma_u(&self) -> f64 {
        10f64.powf(self.gamma_u_db / 10.0)
    }

    fn analog(&self) -> AnalogParams {
        AnalogParams {
            beta: self.beta,
            epsilon: self.epsilon,
            gamma_d: self.gamma_d(),
            gamma_u: self.gamma_u(),
            kappa: self.kappa,
        }
    }

    fn digital(&self) -> DigitalParams {
        DigitalParams {
            beta: self.beta,
            epsilon: self.epsilon,
            gamma_d: self.gamma_d(),
            bt_bar: self.bt_bar,
        }
    }
}

/// Monte Carlo settings attached to a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    /// Antennas per station, unless the sweep variable is the antenna count.
    pub n_antennas: usize,
    /// Channel realizations per point and scheme.
    pub n_realizations: usize,
    /// Base RNG seed.
    pub seed: u64,
}

/// A parameter sweep definition.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Which parameter varies.
    pub variable: SweepVariable,
    /// First grid point.
    pub start: f64,
    /// Last grid point (inclusive up to rounding).
    pub stop: f64,
    /// Grid spacing, strictly positive.
    pub step: f64,
    /// Everything else.
    pub fixed: SystemParams,
    /// Feedback model the sweep optimizes.
    pub feedback: FeedbackKind,
    /// Optional per-point Monte Carlo cross-check.
    pub mc: Option<McSettings>,
}

/// One scheme's optimized operating point with its intermediates.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemePoint {
    /// Optimized limiting SINR.
    pub sinr: f64,
    /// Optimal allocation: power split `nu` (analog) or direct bits
    /// `bd_bar` (quantized).
    pub allocation: f64,
    /// Optimal rescaled regularization.
    pub rho: f64,
    /// Operating-regime label.
    pub regime: String,
    /// Effective SNR when the limit reduces to a single-channel form.
    pub gamma_e: Option<f64>,
    /// Interference fixed point when the limit keeps both weights.
    pub gamma: Option<f64>,
    /// Direct-channel error variance (analog) or distortion (quantized).
    pub delta_d: f64,
    /// Cross-channel error variance or distortion.
    pub delta_c: f64,
    /// Direct-channel estimate variance or retained fraction.
    pub omega_d: f64,
    /// Cross-channel estimate variance or retained fraction.
    pub omega_c: f64,
    /// Monte Carlo mean SINR, when requested.
    pub mc_sinr: Option<f64>,
    /// Monte Carlo normalized rate difference, when requested.
    pub mc_diff: Option<f64>,
}

/// One sweep grid point: the variable value plus all three schemes.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Value of the swept variable.
    pub x: f64,
    /// Joint processing.
    pub mcp: SchemePoint,
    /// Coordinated beamforming.
    pub cbf: SchemePoint,
    /// Single-cell baseline.
    pub scp: SchemePoint,
}

/// A grid point that could not be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    /// Value of the swept variable.
    pub x: f64,
    /// What went wrong.
    pub message: String,
}

/// Sweep output: rows for the points that succeeded, failures for the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    /// Successful points in grid order.
    pub rows: Vec<SweepRow>,
    /// Failed points in grid order.
    pub failures: Vec<SweepFailure>,
}

/// Budget conversion mode tying analog and quantized feedback together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConversionMode {
    /// Bits delivered at the uplink capacity over the feedback window.
    UplinkRate,
    /// Bits delivered by a fixed modulation at `eta` bits per symbol.
    Modulation,
}

impl std::fmt::Display for ConversionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ConversionMode::UplinkRate => "uplink_rate",
            ConversionMode::Modulation => "modulation",
        })
    }
}

impl std::str::FromStr for ConversionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uplink_rate" | "uplink-rate" | "rate" => Ok(ConversionMode::UplinkRate),
            "modulation" | "mod" => Ok(ConversionMode::Modulation),
            other => Err(Error::config(format!("unknown conversion mode `{other}`"))),
        }
    }
}

/// How an uplink budget of `kappa` symbols per coefficient turns into bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetConversion {
    /// Conversion rule.
    pub mode: ConversionMode,
    /// Uplink symbols per channel coefficient.
    pub kappa: f64,
    /// Bits per uplink symbol; used by the modulation rule only.
    pub eta: f64,
}

impl Default for BudgetConversion {
    fn default() -> Self {
        BudgetConversion {
            mode: ConversionMode::Modulation,
            kappa: 1.0,
            eta: 1.0,
        }
    }
}

impl BudgetConversion {
    fn validate(&self) -> Result<()> {
        if !(self.kappa >= 1.0) {
            return Err(Error::domain("kappa must be at least 1"));
        }
        if !(self.eta > 0.0) {
            return Err(Error::domain("eta must be positive"));
        }
        Ok(())
    }
}

/// Per-antenna bit budget equivalent to an analog feedback window.
///
/// The uplink-rate rule transmits over the same `2*kappa*N` symbol window
/// at the capacity of the effective feedback channel,
/// `bt_bar = 2*kappa*log2(1 + (1+epsilon)*gamma_u)`; the modulation rule
/// packs `eta` bits per symbol, `bt_bar = 2*kappa/eta`.
pub fn convert_budget(conv: &BudgetConversion, epsilon: f64, gamma_u: f64) -> Result<f64> {
    conv.validate()?;
    match conv.mode {
        ConversionMode::UplinkRate => {
            if !(gamma_u > 0.0) || !(epsilon >= 0.0) {
                return Err(Error::domain("need gamma_u > 0 and epsilon >= 0"));
            }
            Ok(2.0 * conv.kappa * (1.0 + (1.0 + epsilon) * gamma_u).log2())
        }
        ConversionMode::Modulation => Ok(2.0 * conv.kappa / conv.eta),
    }
}

/// Feedback window length recovering a given bit budget; inverse of
/// [`convert_budget`] in `kappa`.
pub fn invert_budget(
    conv: &BudgetConversion,
    bt_bar: f64,
    epsilon: f64,
    gamma_u: f64,
) -> Result<f64> {
    if !(conv.eta > 0.0) {
        return Err(Error::domain("eta must be positive"));
    }
    if !(bt_bar > 0.0) {
        return Err(Error::domain("bt_bar must be positive"));
    }
    match conv.mode {
        ConversionMode::UplinkRate => {
            if !(gamma_u > 0.0) || !(epsilon >= 0.0) {
                return Err(Error::domain("need gamma_u > 0 and epsilon >= 0"));
            }
            Ok(bt_bar / (2.0 * (1.0 + (1.0 + epsilon) * gamma_u).log2()))
        }
        ConversionMode::Modulation => Ok(bt_bar * conv.eta / 2.0),
    }
}

fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) {
        return Err(Error::config("step must be positive"));
    }
    if !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::config("need finite start <= stop"));
    }
    let mut xs = Vec::new();
    let mut i = 0u64;
    loop {
        let x = start + i as f64 * step;
        if x > stop + 1e-9 * step {
            break;
        }
        xs.push(x);
        i += 1;
    }
    if xs.is_empty() {
        return Err(Error::config("empty sweep grid"));
    }
    Ok(xs)
}

fn params_at(spec: &SweepSpec, x: f64) -> SystemParams {
    let mut p = spec.fixed;
    match spec.variable {
        SweepVariable::Epsilon => p.epsilon = x,
        SweepVariable::BtBar => p.bt_bar = x,
        SweepVariable::Kappa => p.kappa = x,
        SweepVariable::NAntennas => {}
    }
    p
}

fn mc_check(
    spec: &SweepSpec,
    x: f64,
    sys: &SystemParams,
    scheme: Scheme,
    point: &mut SchemePoint,
) -> Result<()> {
    let Some(mc) = spec.mc else {
        return Ok(());
    };
    let n = if spec.variable == SweepVariable::NAntennas {
        x.round() as usize
    } else {
        mc.n_antennas
    };
    let k = (sys.beta * n as f64).round() as usize;
    if k < 1 {
        return Err(Error::config("beta * n_antennas rounds to zero users"));
    }
    let feedback = match spec.feedback {
        FeedbackKind::Analog => Feedback::Analog {
            nu: point.allocation,
            gamma_u: sys.gamma_u(),
            kappa: sys.kappa,
        },
        FeedbackKind::Rvq => Feedback::Rvq {
            bd_bar: point.allocation,
            bc_bar: (sys.bt_bar - point.allocation).max(0.0),
            mode: RvqMode::Statistical,
        },
    };
    let mut cfg = SimConfig {
        n_antennas: n,
        n_users_per_cell: k,
        epsilon: sys.epsilon,
        gamma_d: sys.gamma_d(),
        scheme,
        feedback,
        alpha: 1.0,
        n_realizations: mc.n_realizations,
        seed: mc.seed,
    };
    cfg.alpha = sim::alpha_from_rho(&cfg, point.rho)?;
    let summary = sim::run_simulation(&cfg)?;
    point.mc_sinr = Some(summary.mean_sinr);
    point.mc_diff = Some(summary.normalized_diff);
    Ok(())
}

fn analog_point(sys: &SystemParams, scheme: Scheme) -> Result<SchemePoint> {
    let p = sys.analog();
    let (res, gamma_e, gamma) = match scheme {
        Scheme::Mcp => {
            let res = analog::mcp_optimize(&p)?;
            let ge = analog::mcp_effective_snr(&p, res.nu_star)?;
            (res, Some(ge), None)
        }
        Scheme::Cbf => {
            let res = analog::cbf_optimize(&p)?;
            let stats = analog::estimator_stats(&p, res.nu_star)?;
            let gamma = solve_gamma(&GammaParams {
                beta: p.beta,
                rho: res.rho_star,
                w1: stats.omega_c,
                w2: stats.omega_d,
            })?;
            (res, None, Some(gamma))
        }
        Scheme::Scp => {
            let res = analog::scp_optimize(&p)?;
            let ge = analog::scp_effective_snr(&p)?;
            (res, Some(ge), None)
        }
    };
    let stats = analog::estimator_stats(&p, res.nu_star)?;
    Ok(SchemePoint {
        sinr: res.sinr_limit,
        allocation: res.nu_star,
        rho: res.rho_star,
        regime: res.regime.to_string(),
        gamma_e,
        gamma,
        delta_d: stats.delta_d,
        delta_c: stats.delta_c,
        omega_d: stats.omega_d,
        omega_c: stats.omega_c,
        mc_sinr: None,
        mc_diff: None,
    })
}

fn digital_point(sys: &SystemParams, scheme: Scheme) -> Result<SchemePoint> {
    let p = sys.digital();
    let x_t = p.x_t();
    let (sinr, bits, rho, regime, gamma_e, gamma) = match scheme {
        Scheme::Mcp => {
            let res = digital::mcp_optimize_q(&p)?;
            let ge = digital::mcp_effective_snr_q(&p, res.bits.x_d)?;
            (
                res.sinr_limit,
                res.bits,
                res.rho_star,
                res.branch.to_string(),
                Some(ge),
                None,
            )
        }
        Scheme::Cbf => {
            let res = digital::cbf_joint_opt(&p)?;
            let geom = digital::cbf_geometry(&p, res.rho_star)?;
            (
                res.sinr_limit,
                res.bits,
                res.rho_star,
                res.branch.to_string(),
                None,
                Some(geom.gamma_q),
            )
        }
        Scheme::Scp => {
            let res = digital::scp_limiting_sinr_q(&p)?;
            let bits = digital::BitSplit::from_x_d(x_t, &p)?;
            let ge = digital::scp_effective_snr_q(&p)?;
            (
                res.sinr_limit,
                bits,
                res.rho_star,
                "baseline".to_string(),
                Some(ge),
                None,
            )
        }
    };
    Ok(SchemePoint {
        sinr,
        allocation: bits.bd_bar,
        rho,
        regime,
        gamma_e,
        gamma,
        delta_d: bits.x_d,
        delta_c: if scheme == Scheme::Scp {
            sys.epsilon
        } else {
            sys.epsilon * x_t / bits.x_d
        },
        omega_d: 1.0 - bits.x_d,
        omega_c: if scheme == Scheme::Scp {
            0.0
        } else {
            1.0 - x_t / bits.x_d
        },
        mc_sinr: None,
        mc_diff: None,
    })
}

fn sweep_point(spec: &SweepSpec, x: f64) -> Result<SweepRow> {
    let sys = params_at(spec, x);
    let point = |scheme| match spec.feedback {
        FeedbackKind::Analog => analog_point(&sys, scheme),
        FeedbackKind::Rvq => digital_point(&sys, scheme),
    };
    let mut mcp = point(Scheme::Mcp)?;
    let mut cbf = point(Scheme::Cbf)?;
    let mut scp = point(Scheme::Scp)?;
    mc_check(spec, x, &sys, Scheme::Mcp, &mut mcp)?;
    mc_check(spec, x, &sys, Scheme::Cbf, &mut cbf)?;
    mc_check(spec, x, &sys, Scheme::Scp, &mut scp)?;
    Ok(SweepRow { x, mcp, cbf, scp })
}

/// Runs a sweep; failed points are collected, not fatal.
///
/// Points evaluate in parallel; rows and failures keep grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    if spec.variable == SweepVariable::NAntennas {
        if spec.mc.is_none() {
            return Err(Error::config(
                "an antenna-count sweep only affects the Monte Carlo columns; attach mc settings",
            ));
        }
        if spec.start < 2.0 {
            return Err(Error::config("antenna counts below 2 are not simulable"));
        }
    }
    let xs = grid(spec.start, spec.stop, spec.step)?;
    let outcomes: Vec<(f64, Result<SweepRow>)> = xs
        .into_par_iter()
        .map(|x| (x, sweep_point(spec, x)))
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (x, outcome) in outcomes {
        match outcome {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(SweepFailure {
                x,
                message: e.to_string(),
            }),
        }
    }
    Ok(SweepTable { rows, failures })
}

/// One point of an analog-versus-quantized comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    /// Cross-channel gain at this point.
    pub x: f64,
    /// Bit budget granted to the quantized columns at this point.
    pub bt_bar: f64,
    /// Optimized limits per scheme and feedback model.
    pub mcp_analog: f64,
    /// Joint processing, quantized.
    pub mcp_rvq: f64,
    /// Coordinated beamforming, analog.
    pub cbf_analog: f64,
    /// Coordinated beamforming, quantized.
    pub cbf_rvq: f64,
    /// Single-cell baseline, analog.
    pub scp_analog: f64,
    /// Single-cell baseline, quantized.
    pub scp_rvq: f64,
}

/// An analog-versus-quantized comparison over a cross-gain grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareSpec {
    /// First cross gain.
    pub start: f64,
    /// Last cross gain.
    pub stop: f64,
    /// Grid spacing.
    pub step: f64,
    /// Fixed scenario parameters; the epsilon field is overridden by the
    /// grid and kappa by the conversion.
    pub fixed: SystemParams,
    /// Rule converting the analog window into bits.
    pub conversion: BudgetConversion,
}

/// Comparison output mirroring [`SweepTable`].
#[derive(Debug, Clone, PartialEq)]
pub struct CompareTable {
    /// Successful points in grid order.
    pub rows: Vec<CompareRow>,
    /// Failed points in grid order.
    pub failures: Vec<SweepFailure>,
}

fn compare_point(spec: &CompareSpec, x: f64) -> Result<CompareRow> {
    let mut sys = spec.fixed;
    sys.epsilon = x;
    sys.kappa = spec.conversion.kappa;
    sys.bt_bar = convert_budget(&spec.conversion, x, sys.gamma_u())?;
    let a = |scheme| analog_point(&sys, scheme);
    let d = |scheme| digital_point(&sys, scheme);
    Ok(CompareRow {
        x,
        bt_bar: sys.bt_bar,
        mcp_analog: a(Scheme::Mcp)?.sinr,
        mcp_rvq: d(Scheme::Mcp)?.sinr,
        cbf_analog: a(Scheme::Cbf)?.sinr,
        cbf_rvq: d(Scheme::Cbf)?.sinr,
        scp_analog: a(Scheme::Scp)?.sinr,
        scp_rvq: d(Scheme::Scp)?.sinr,
    })
}

/// Compares analog and quantized feedback under a common uplink budget.
pub fn run_compare(spec: &CompareSpec) -> Result<CompareTable> {
    spec.conversion.validate()?;
    let xs = grid(spec.start, spec.stop, spec.step)?;
    let outcomes: Vec<(f64, Result<CompareRow>)> = xs
        .into_par_iter()
        .map(|x| (x, compare_point(spec, x)))
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (x, outcome) in outcomes {
        match outcome {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(SweepFailure {
                x,
                message: e.to_string(),
            }),
        }
    }
    Ok(CompareTable { rows, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_conversions_match_hand_values() {
        let rate = BudgetConversion {
            mode: ConversionMode::UplinkRate,
            kappa: 1.0,
            eta: 1.0,
        };
        let bt = convert_budget(&rate, 1.0, 1.0).unwrap();
        assert!((bt - 2.0 * 3f64.log2()).abs() < 1e-12);

        let modu = BudgetConversion::default();
        assert_eq!(convert_budget(&modu, 0.3, 1.0).unwrap(), 2.0);
    }

    #[test]
    fn budget_conversions_round_trip() {
        for mode in [ConversionMode::UplinkRate, ConversionMode::Modulation] {
            let conv = BudgetConversion {
                mode,
                kappa: 2.5,
                eta: 1.5,
            };
            let bt = convert_budget(&conv, 0.5, 2.0).unwrap();
            let kappa = invert_budget(&conv, bt, 0.5, 2.0).unwrap();
            assert!(
                (kappa - conv.kappa).abs() < 1e-12,
                "{mode}: {kappa} vs {}",
                conv.kappa
            );
        }
    }

    #[test]
    fn grids_validate_and_include_endpoints() {
        assert!(grid(0.0, 1.0, 0.0).is_err());
        assert!(grid(1.0, 0.0, 0.1).is_err());
        let xs = grid(0.0, 1.0, 0.25).unwrap();
        assert_eq!(xs.len(), 5);
        assert_eq!(xs[4], 1.0);
        assert_eq!(grid(0.7, 0.7, 1.0).unwrap(), vec![0.7]);
    }

    #[test]
    fn one_point_sweep_matches_direct_calls() {
        let spec = SweepSpec {
            variable: SweepVariable::Epsilon,
            start: 0.5,
            stop: 0.5,
            step: 1.0,
            fixed: SystemParams::default(),
            feedback: FeedbackKind::Analog,
            mc: None,
        };
        let table = run_sweep(&spec).unwrap();
        assert_eq!(table.rows.len(), 1);
        let row = &table.rows[0];
        let p = SystemParams::default().analog();
        let mcp = analog::mcp_optimize(&p).unwrap();
        assert_eq!(row.mcp.sinr, mcp.sinr_limit);
        assert_eq!(row.mcp.allocation, mcp.nu_star);
        let cbf = analog::cbf_optimize(&p).unwrap();
        assert_eq!(row.cbf.sinr, cbf.sinr_limit);
    }

    #[test]
    fn analog_sweep_shows_full_direct_training_plateau_as_prefix() {
        let spec = SweepSpec {
            variable: SweepVariable::Epsilon,
            start: 0.01,
            stop: 0.31,
            step: 0.02,
            fixed: SystemParams::default(),
            feedback: FeedbackKind::Analog,
            mc: None,
        };
        let table = run_sweep(&spec).unwrap();
        assert!(table.failures.is_empty());
        let labels: Vec<&str> = table
            .rows
            .iter()
            .map(|r| r.mcp.regime.as_str())
            .collect();
        let plateau = labels.iter().take_while(|l| **l == "scp_own_cell").count();
        assert!(plateau >= 1, "plateau missing: {labels:?}");
        assert!(
            labels[plateau..].iter().all(|l| *l != "scp_own_cell"),
            "plateau must be a prefix: {labels:?}"
        );
        for r in &table.rows {
            if r.mcp.regime == "scp_own_cell" {
                assert_eq!(r.mcp.allocation, 1.0);
            }
        }
    }

    #[test]
    fn quantized_sweep_dips_near_the_known_cross_gain() {
        let spec = SweepSpec {
            variable: SweepVariable::Epsilon,
            start: 0.40,
            stop: 1.0,
            step: 0.02,
            fixed: SystemParams::default(),
            feedback: FeedbackKind::Rvq,
            mc: None,
        };
        let table = run_sweep(&spec).unwrap();
        let min = table
            .rows
            .iter()
            .min_by(|a, b| a.mcp.sinr.partial_cmp(&b.mcp.sinr).unwrap())
            .unwrap();
        assert!(
            (min.x - 0.72).abs() <= 0.03,
            "minimum of the joint-processing curve at {}",
            min.x
        );
    }

    #[test]
    fn failing_points_are_collected_not_fatal() {
        let spec = SweepSpec {
            variable: SweepVariable::Kappa,
            start: 0.5,
            stop: 1.5,
            step: 0.5,
            fixed: SystemParams::default(),
            feedback: FeedbackKind::Analog,
            mc: None,
        };
        let table = run_sweep(&spec).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert_eq!(table.failures.len(), 1);
        assert_eq!(table.failures[0].x, 0.5);
    }

    #[test]
    fn compare_emits_budget_alongside_limits() {
        let spec = CompareSpec {
            start: 0.2,
            stop: 0.4,
            step: 0.2,
            fixed: SystemParams::default(),
            conversion: BudgetConversion::default(),
        };
        let table = run_compare(&spec).unwrap();
        assert_eq!(table.rows.len(), 2);
        for row in &table.rows {
            assert_eq!(row.bt_bar, 2.0);
            for v in [
                row.mcp_analog,
                row.mcp_rvq,
                row.cbf_analog,
                row.cbf_rvq,
                row.scp_analog,
                row.scp_rvq,
            ] {
                assert!(v > 0.0);
            }
        }
    }

    #[test]
    fn antenna_sweeps_require_monte_carlo() {
        let spec = SweepSpec {
            variable: SweepVariable::NAntennas,
            start: 10.0,
            stop: 20.0,
            step: 10.0,
            fixed: SystemParams::default(),
            feedback: FeedbackKind::Analog,
            mc: None,
        };
        assert!(run_sweep(&spec).is_err());
    }

    #[test]
    fn mc_columns_appear_when_requested() {
        let spec = SweepSpec {
            variable: SweepVariable::Epsilon,
            start: 0.5,
            stop: 0.5,
            step: 1.0,
            fixed: SystemParams::default(),
            feedback: FeedbackKind::Analog,
            mc: Some(McSettings {
                n_antennas: 10,
                n_realizations: 20,
                seed: 5,
            }),
        };
        let table = run_sweep(&spec).unwrap();
        let row = &table.rows[0];
        for point in [&row.mcp, &row.cbf, &row.scp] {
            assert!(point.mc_sinr.unwrap() > 0.0);
            assert!(point.mc_diff.unwrap().is_finite());
        }
    }
}

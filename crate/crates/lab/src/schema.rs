//! Row types of every CSV artifact. The header of each file is the field
//! list of its row type, in order; `*_COLUMNS` spell it out for consumers.
//! Empty cells mean "not defined at this row" and always come with a status
//! column or a documented reason, never as NaN.

use serde::{Deserialize, Serialize};

/// `scaling.csv`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub sample: usize,
    pub p: f64,
    pub lambda: f64,
    pub norm_original: f64,
    pub norm_rescaled: f64,
    pub rel_gap: f64,
}
pub const SCALING_COLUMNS: &[&str] = &[
    "sample",
    "p",
    "lambda",
    "norm_original",
    "norm_rescaled",
    "rel_gap",
];

/// `iterations.csv`: one row per Picard iteration. `ratio` is empty on the
/// first row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub iteration: usize,
    pub norm: f64,
    pub difference: f64,
    pub ratio: Option<f64>,
}
pub const ITERATION_COLUMNS: &[&str] = &["iteration", "norm", "difference", "ratio"];

/// `norms.csv`: per-sample diagnostics of the velocity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub t: f64,
    #[serde(rename = "weakL3")]
    pub weak_l3: f64,
    pub besov_critical: f64,
    #[serde(rename = "L2")]
    pub l2: f64,
    pub mild_residual: Option<f64>,
}
pub const NORM_COLUMNS: &[&str] = &["t", "weakL3", "besov_critical", "L2", "mild_residual"];

/// `growth.csv`: `T ↦ ‖v‖_{𝕃^{r0:∞}_p(T)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub horizon: f64,
    pub norm: f64,
    pub status: String,
    pub from_failed_solve: bool,
}
pub const GROWTH_COLUMNS: &[&str] = &["horizon", "norm", "status", "from_failed_solve"];

/// `decomposition.csv`: bucket norms per level and sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionRow {
    pub n: usize,
    pub t: f64,
    #[serde(rename = "v_L2")]
    pub v_l2: f64,
    #[serde(rename = "H_L2")]
    pub h_l2: f64,
    #[serde(rename = "W_L2")]
    pub w_l2: f64,
    #[serde(rename = "Z_L2")]
    pub z_l2: f64,
    #[serde(rename = "residual_L2")]
    pub residual_l2: f64,
}
pub const DECOMPOSITION_COLUMNS: &[&str] =
    &["n", "t", "v_L2", "H_L2", "W_L2", "Z_L2", "residual_L2"];

/// `longtime.csv`. `gronwall_bound` is empty before the reference time
/// `t0` recorded in `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongtimeRow {
    pub t: f64,
    #[serde(rename = "weakL3_uf")]
    pub weak_l3_uf: f64,
    #[serde(rename = "L2_omega")]
    pub l2_omega: f64,
    pub gronwall_bound: Option<f64>,
}
pub const LONGTIME_COLUMNS: &[&str] = &["t", "weakL3_uf", "L2_omega", "gronwall_bound"];

/// `stability.csv`. `diff_norm` and `ratio` are empty unless `status` is
/// `converged`; `ratio` is also empty for `delta_rel = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub delta_rel: f64,
    pub delta_norm: f64,
    pub diff_norm: Option<f64>,
    pub ratio: Option<f64>,
    pub status: String,
}
pub const STABILITY_COLUMNS: &[&str] = &["delta_rel", "delta_norm", "diff_norm", "ratio", "status"];

/// `energy.csv`: energy report of a difference `ω`. `gronwall_bound` is
/// empty at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub t: f64,
    #[serde(rename = "L2_omega_sq")]
    pub l2_omega_sq: f64,
    pub cum_grad_sq: f64,
    pub trilinear: f64,
    pub trilinear_bound: f64,
    pub gronwall_bound: Option<f64>,
}
pub const ENERGY_COLUMNS: &[&str] = &[
    "t",
    "L2_omega_sq",
    "cum_grad_sq",
    "trilinear",
    "trilinear_bound",
    "gronwall_bound",
];

/// `richardson.csv`: `gap = sup_t ‖direct(s) - perturbation(2s)‖_{L^2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichardsonRow {
    pub substeps: usize,
    pub gap: f64,
    pub rel_gap: f64,
}
pub const RICHARDSON_COLUMNS: &[&str] = &["substeps", "gap", "rel_gap"];

/// `gallery.csv`: one row per force. Solve-derived cells are empty when
/// the solve failed (`status` says why).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GalleryRow {
    pub name: String,
    pub y_norm: f64,
    pub saturated: bool,
    pub status: String,
    #[serde(rename = "weakL3_sup")]
    pub weak_l3_sup: Option<f64>,
    pub bound_ratio: Option<f64>,
    pub bound_holds: Option<bool>,
}
pub const GALLERY_COLUMNS: &[&str] = &[
    "name",
    "y_norm",
    "saturated",
    "status",
    "weakL3_sup",
    "bound_ratio",
    "bound_holds",
];

/// `gallery_series.csv`: weak-L³ time series of each `U_f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub name: String,
    pub t: f64,
    #[serde(rename = "weakL3_uf")]
    pub weak_l3_uf: f64,
}
pub const SERIES_COLUMNS: &[&str] = &["name", "t", "weakL3_uf"];

/// `dirac_sweep.csv`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiracRow {
    pub width: f64,
    pub y_norm: f64,
    pub saturated: bool,
}
pub const DIRAC_COLUMNS: &[&str] = &["width", "y_norm", "saturated"];

/// Column list of each CSV file name a scenario may emit.
pub fn columns_of(file: &str) -> Option<&'static [&'static str]> {
    Some(match file {
        "scaling.csv" => SCALING_COLUMNS,
        "iterations.csv" => ITERATION_COLUMNS,
        "norms.csv" => NORM_COLUMNS,
        "growth.csv" => GROWTH_COLUMNS,
        "decomposition.csv" => DECOMPOSITION_COLUMNS,
        "longtime.csv" => LONGTIME_COLUMNS,
        "stability.csv" => STABILITY_COLUMNS,
        "energy.csv" => ENERGY_COLUMNS,
        "richardson.csv" => RICHARDSON_COLUMNS,
        "gallery.csv" => GALLERY_COLUMNS,
        "gallery_series.csv" => SERIES_COLUMNS,
        "dirac_sweep.csv" => DIRAC_COLUMNS,
        f if f.starts_with("iterations_") => ITERATION_COLUMNS,
        f if f.starts_with("norms_") => NORM_COLUMNS,
        _ => return None,
    })
}

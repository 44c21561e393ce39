//! Scenario files.
//!
//! A scenario is a TOML document naming one study plus that study's section.
//! Every physical field carries its unit in the name (`frequency_ghz`,
//! `bs_height_m`, ...). Missing fields take the reference defaults below, and
//! [`load_scenario`] reports every invalid field at once.

use std::path::{Path, PathBuf};

use eit_core::pattern::{PatternSet, PatternShape};
use eit_core::Position3;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::formats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    DenselySpaced,
    NearField,
    TriPol,
    EmCoreValidation,
}

impl StudyKind {
    pub const ALL: [StudyKind; 4] = [
        StudyKind::DenselySpaced,
        StudyKind::NearField,
        StudyKind::TriPol,
        StudyKind::EmCoreValidation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StudyKind::DenselySpaced => "densely-spaced",
            StudyKind::NearField => "near-field",
            StudyKind::TriPol => "tri-pol",
            StudyKind::EmCoreValidation => "em-core-validation",
        }
    }

    /// Name of the scenario section that configures the study.
    pub fn section(self) -> &'static str {
        match self {
            StudyKind::DenselySpaced => "densely_spaced",
            StudyKind::NearField => "near_field",
            StudyKind::TriPol => "tri_pol",
            StudyKind::EmCoreValidation => "em_core",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            StudyKind::DenselySpaced => {
                "ergodic capacity of a densely spaced receive array against element spacing, \
                 for ideal and progressively non-ideal channel and hardware assumptions"
            }
            StudyKind::NearField => {
                "planar versus spherical wavefront correlation over UE distance, with \
                 per-element phase profiles, for large base-station arrays"
            }
            StudyKind::TriPol => {
                "capacity distribution of joint uplink/downlink tri-polarized channel \
                 estimation against an uplink-only benchmark"
            }
            StudyKind::EmCoreValidation => {
                "Green's function decomposition, delta-port degeneration and field-region \
                 checks of the electromagnetic primitives"
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Relative to the working directory.
    pub directory: String,
    pub format: OutputFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: "results".into(),
            format: OutputFormat::Csv,
        }
    }
}

/// Element pattern choice. Table files are resolved relative to the scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PatternSpec {
    UnitDual,
    IsotropicTheta,
    Dipole {
        axis: [f64; 3],
    },
    Directional {
        half_power_beamwidth_deg: f64,
        #[serde(default)]
        boresight_zenith_deg: f64,
        #[serde(default)]
        boresight_azimuth_deg: f64,
        #[serde(default)]
        slant_deg: f64,
    },
    Table {
        file: String,
    },
}

impl PatternSpec {
    fn check(&self, field: &str, base: &Path, errors: &mut Vec<String>) {
        if let Err(e) = self.resolve(base, field) {
            errors.extend(e);
        }
    }

    pub fn resolve(&self, base: &Path, field: &str) -> Result<PatternSet, Vec<String>> {
        match self {
            PatternSpec::UnitDual => Ok(PatternSet::unit_dual()),
            PatternSpec::IsotropicTheta => Ok(PatternSet::isotropic_theta()),
            PatternSpec::Dipole { axis } => {
                let a = Position3::new(axis[0], axis[1], axis[2]);
                if !a.is_finite() || a.norm() == 0.0 {
                    return Err(vec![format!("{field}.axis: must be a finite nonzero vector")]);
                }
                Ok(PatternSet::dipole(a))
            }
            PatternSpec::Directional {
                half_power_beamwidth_deg: hpbw,
                boresight_zenith_deg: zen,
                boresight_azimuth_deg: az,
                slant_deg,
            } => {
                let mut errs = Vec::new();
                if !(*hpbw > 0.0 && *hpbw < 180.0) {
                    errs.push(format!("{field}.half_power_beamwidth_deg: {hpbw} outside (0, 180)"));
                }
                if !(0.0..=180.0).contains(zen) {
                    errs.push(format!("{field}.boresight_zenith_deg: {zen} outside [0, 180]"));
                }
                if !az.is_finite() || !slant_deg.is_finite() {
                    errs.push(format!("{field}: angles must be finite"));
                }
                if !errs.is_empty() {
                    return Err(errs);
                }
                Ok(PatternSet::directional(
                    hpbw.to_radians(),
                    zen.to_radians(),
                    az.to_radians(),
                    slant_deg.to_radians(),
                ))
            }
            PatternSpec::Table { file } => formats::load_pattern_table(file, base, field)
                .map(|t| PatternSet::new(PatternShape::Table(t))),
        }
    }
}

/// One von Mises-Fisher component of an explicit angular spectrum, with the
/// mean direction in the array's own frame (zenith from the boresight).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumComponent {
    pub weight: f64,
    pub zenith_deg: f64,
    pub azimuth_deg: f64,
    pub concentration: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Isotropic scattering, unit patterns, lossless elements.
    Ideal,
    /// Clustered scattering, unit patterns, lossless elements.
    Ni,
    /// Clustered scattering with embedded element patterns.
    NiPd,
    /// As `NiPd` with the configured element efficiency.
    Proposed,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Ideal => "ideal",
            Scheme::Ni => "ni",
            Scheme::NiPd => "ni-pd",
            Scheme::Proposed => "proposed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DenseConfig {
    pub frequency_ghz: f64,
    pub snr_db: f64,
    pub realizations: usize,
    pub tx_aperture_wavelengths: [f64; 2],
    pub rx_aperture_wavelengths: [f64; 2],
    pub tx_spacing_wavelengths: f64,
    pub rx_spacings_wavelengths: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub proposed_efficiency: f64,
    pub xpr_mean_db: f64,
    pub xpr_std_db: f64,
    pub cluster_table: String,
    /// Defaults to the table's arrival spread.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rx_spread_deg: Option<f64>,
    /// Defaults to the table's departure spread.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tx_spread_deg: Option<f64>,
    /// Replaces the cluster-table spectrum at the receiver.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rx_spectrum: Option<Vec<SpectrumComponent>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tx_spectrum: Option<Vec<SpectrumComponent>>,
    /// Used by the schemes with embedded patterns.
    pub rx_pattern: PatternSpec,
    pub tx_pattern: PatternSpec,
    pub quadrature_order: usize,
}

impl Default for DenseConfig {
    fn default() -> Self {
        Self {
            frequency_ghz: 4.7,
            snr_db: 0.0,
            realizations: 1000,
            tx_aperture_wavelengths: [4.0, 4.0],
            rx_aperture_wavelengths: [1.0, 1.0],
            tx_spacing_wavelengths: 0.5,
            rx_spacings_wavelengths: vec![0.5, 0.25, 0.125],
            schemes: vec![Scheme::Ideal, Scheme::Ni, Scheme::NiPd, Scheme::Proposed],
            proposed_efficiency: 0.8,
            xpr_mean_db: 8.0,
            xpr_std_db: 3.0,
            cluster_table: "builtin:cdl-b".into(),
            rx_spread_deg: None,
            tx_spread_deg: None,
            rx_spectrum: None,
            tx_spectrum: None,
            rx_pattern: PatternSpec::Dipole { axis: [1.0, 0.0, 0.0] },
            tx_pattern: PatternSpec::Directional {
                half_power_beamwidth_deg: 70.0,
                boresight_zenith_deg: 0.0,
                boresight_azimuth_deg: 0.0,
                slant_deg: 45.0,
            },
            quadrature_order: 16,
        }
    }
}

/// Carrier and base-station aperture. Without a geometry file the array is a
/// `bs_rows × bs_columns` grid spanning `aperture_width_m × aperture_height_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarrierConfig {
    pub frequency_ghz: f64,
    pub aperture_width_m: f64,
    pub aperture_height_m: f64,
    /// Element positions in metres, one `x y z` row each, relative to the
    /// array origin at the base-station height.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry_file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VisibilityConfig {
    pub a: f64,
    pub lambda_db: f64,
    pub b: f64,
    pub xi: f64,
    pub roll_off: f64,
}

impl Default for VisibilityConfig {
    fn default() -> Self {
        let m = eit_core::nearfield::VisibilityModel::default();
        Self {
            a: m.a,
            lambda_db: m.lambda,
            b: m.b,
            xi: m.xi,
            roll_off: m.roll_off,
        }
    }
}

impl VisibilityConfig {
    pub fn model(&self) -> eit_core::nearfield::VisibilityModel {
        eit_core::nearfield::VisibilityModel {
            a: self.a,
            lambda: self.lambda_db,
            b: self.b,
            xi: self.xi,
            roll_off: self.roll_off,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NearFieldConfig {
    pub bs_rows: usize,
    pub bs_columns: usize,
    pub bs_height_m: f64,
    pub bs_pattern: PatternSpec,
    pub ue_pattern: PatternSpec,
    pub ue_lateral_offset_m: f64,
    pub ue_height_m: f64,
    /// Line-of-sight sweep, ground distance from the base station.
    pub ue_distances_m: Vec<f64>,
    pub phase_profile_distances_m: Vec<f64>,
    /// Random drops with scattering and visibility.
    pub random_ues: usize,
    pub drop_distance_range_m: [f64; 2],
    pub drop_lateral_range_m: [f64; 2],
    pub k_factor_db: f64,
    pub cluster_table: String,
    pub delay_spread_ns: f64,
    pub xpr_std_db: f64,
    pub visibility: VisibilityConfig,
    pub time_samples_s: Vec<f64>,
    pub ue_velocity_mps: [f64; 3],
    pub carriers: Vec<CarrierConfig>,
}

impl Default for NearFieldConfig {
    fn default() -> Self {
        Self {
            bs_rows: 4,
            bs_columns: 32,
            bs_height_m: 25.0,
            bs_pattern: PatternSpec::IsotropicTheta,
            ue_pattern: PatternSpec::IsotropicTheta,
            ue_lateral_offset_m: 5.0,
            ue_height_m: 1.5,
            ue_distances_m: vec![
                20.0, 30.0, 40.0, 50.0, 60.0, 80.0, 100.0, 150.0, 200.0, 250.0, 300.0, 400.0, 500.0,
                1000.0, 1500.0, 2000.0, 3000.0,
            ],
            phase_profile_distances_m: vec![20.0, 200.0],
            random_ues: 100,
            drop_distance_range_m: [20.0, 500.0],
            drop_lateral_range_m: [-50.0, 50.0],
            k_factor_db: 9.0,
            cluster_table: "builtin:cdl-b".into(),
            delay_spread_ns: 100.0,
            xpr_std_db: 0.0,
            visibility: VisibilityConfig::default(),
            time_samples_s: vec![0.0],
            ue_velocity_mps: [0.0; 3],
            carriers: vec![
                CarrierConfig {
                    frequency_ghz: 6.7,
                    aperture_width_m: 1.5,
                    aperture_height_m: 0.33,
                    geometry_file: None,
                },
                CarrierConfig {
                    frequency_ghz: 15.0,
                    aperture_width_m: 1.36,
                    aperture_height_m: 0.32,
                    geometry_file: None,
                },
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TriPolConfig {
    pub frequency_ghz: f64,
    pub ues: usize,
    pub bs_rows: usize,
    pub bs_columns: usize,
    pub bs_width_m: f64,
    pub bs_height_m: f64,
    pub bs_element_beamwidth_deg: f64,
    pub bs_slant_deg: f64,
    pub ue_rows: usize,
    pub ue_columns: usize,
    pub ue_spacing_wavelengths: f64,
    /// Gain of the UE's third (facing-axis) port relative to the other two.
    pub third_port_gain_db: f64,
    /// Two tables (one per slant) replacing the analytic base-station elements.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bs_pattern_tables: Option<Vec<String>>,
    /// Three tables (horizontal, vertical, facing) replacing the UE dipoles;
    /// the UE orientation is then not randomized.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ue_pattern_tables: Option<Vec<String>>,
    pub bs_power_dbm: f64,
    pub ue_power_dbm: f64,
    pub uplink_snr_db: f64,
    pub data_snr_db: f64,
    pub streams: usize,
    /// Fraction of the strongest port power below which a port is weak;
    /// absent means a median split.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grouping_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feedback_bits: Option<u32>,
    pub aod_rotation_deg: f64,
    pub aoa_rotation_deg: f64,
    pub delay_spread_ns: f64,
    pub xpr_std_db: f64,
    pub cluster_table: String,
    pub cdf_points: usize,
}

impl Default for TriPolConfig {
    fn default() -> Self {
        Self {
            frequency_ghz: 6.7,
            ues: 150,
            bs_rows: 4,
            bs_columns: 32,
            bs_width_m: 1.5,
            bs_height_m: 0.33,
            bs_element_beamwidth_deg: 65.0,
            bs_slant_deg: 45.0,
            ue_rows: 2,
            ue_columns: 2,
            ue_spacing_wavelengths: 0.5,
            third_port_gain_db: -10.0,
            bs_pattern_tables: None,
            ue_pattern_tables: None,
            bs_power_dbm: 39.64,
            ue_power_dbm: 23.0,
            uplink_snr_db: 0.0,
            data_snr_db: 10.0,
            streams: 2,
            grouping_threshold: None,
            feedback_bits: None,
            aod_rotation_deg: 40.0,
            aoa_rotation_deg: 180.0,
            delay_spread_ns: 100.0,
            xpr_std_db: 0.0,
            cluster_table: "builtin:cdl-b".into(),
            cdf_points: 21,
        }
    }
}

impl TriPolConfig {
    /// Downlink pilots are stronger than uplink pilots by the power gap.
    pub fn downlink_snr_db(&self) -> f64 {
        self.uplink_snr_db + self.bs_power_dbm - self.ue_power_dbm
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApertureCheck {
    pub frequency_ghz: f64,
    pub aperture_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmCoreConfig {
    pub frequency_ghz: f64,
    pub pairs: usize,
    /// Range of k0·R, sampled log-uniformly.
    pub k0r_range: [f64; 2],
    pub ports: usize,
    pub port_spacing_wavelengths: f64,
    pub link_distance_m: f64,
    pub apertures: Vec<ApertureCheck>,
}

impl Default for EmCoreConfig {
    fn default() -> Self {
        Self {
            frequency_ghz: 4.7,
            pairs: 1000,
            k0r_range: [0.1, 1e4],
            ports: 8,
            port_spacing_wavelengths: 0.5,
            link_distance_m: 3.0,
            apertures: vec![
                ApertureCheck {
                    frequency_ghz: 6.7,
                    aperture_m: 1.53,
                },
                ApertureCheck {
                    frequency_ghz: 15.0,
                    aperture_m: 1.4,
                },
            ],
        }
    }
}

fn default_seed() -> u64 {
    1
}

fn unit_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub study: StudyKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Multiplies realization and UE counts (desk-scale runs use < 1).
    #[serde(default = "unit_scale")]
    pub scale: f64,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub densely_spaced: Option<DenseConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub near_field: Option<NearFieldConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tri_pol: Option<TriPolConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub em_core: Option<EmCoreConfig>,
    /// Directory that relative data-file references resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// `round(count · scale)`, at least one.
pub fn scaled_count(count: usize, scale: f64) -> usize {
    ((count as f64 * scale).round() as usize).max(1)
}

impl Scenario {
    /// A scenario of `kind` with every default.
    pub fn with_defaults(kind: StudyKind) -> Self {
        let mut s = Scenario {
            study: kind,
            seed: default_seed(),
            scale: 1.0,
            output: OutputConfig::default(),
            densely_spaced: None,
            near_field: None,
            tri_pol: None,
            em_core: None,
            base_dir: PathBuf::from("."),
        };
        s.fill_section();
        s
    }

    /// Parses and validates; `base_dir` anchors relative file references.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let mut s: Scenario = toml::from_str(text).map_err(|e| SimError::Validation(vec![e.to_string()]))?;
        s.base_dir = base_dir.to_path_buf();
        s.fill_section();
        let errors = s.validate();
        if errors.is_empty() {
            Ok(s)
        } else {
            Err(SimError::Validation(errors))
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario fields are all representable in TOML")
    }

    /// Hex SHA-256 of the scenario with the output settings stripped, so that
    /// where results go does not change what they record.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut canonical = self.clone();
        canonical.output = OutputConfig::default();
        let digest = Sha256::digest(canonical.to_toml_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn scaled(&self, count: usize) -> usize {
        scaled_count(count, self.scale)
    }

    fn fill_section(&mut self) {
        match self.study {
            StudyKind::DenselySpaced => {
                self.densely_spaced.get_or_insert_with(Default::default);
            }
            StudyKind::NearField => {
                self.near_field.get_or_insert_with(Default::default);
            }
            StudyKind::TriPol => {
                self.tri_pol.get_or_insert_with(Default::default);
            }
            StudyKind::EmCoreValidation => {
                self.em_core.get_or_insert_with(Default::default);
            }
        }
    }

    pub fn dense(&self) -> &DenseConfig {
        self.densely_spaced.as_ref().expect("section filled on load")
    }

    pub fn near(&self) -> &NearFieldConfig {
        self.near_field.as_ref().expect("section filled on load")
    }

    pub fn tripol(&self) -> &TriPolConfig {
        self.tri_pol.as_ref().expect("section filled on load")
    }

    pub fn emcore(&self) -> &EmCoreConfig {
        self.em_core.as_ref().expect("section filled on load")
    }

    /// Every violated constraint, as `field: problem`.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Checker::default();
        if self.seed > i64::MAX as u64 {
            v.push("seed", format!("{} exceeds {}", self.seed, i64::MAX));
        }
        v.positive("scale", self.scale);
        if self.scale > 1e3 {
            v.push("scale", "must not exceed 1000".into());
        }
        if self.output.directory.trim().is_empty() {
            v.push("output.directory", "must not be empty".into());
        }
        let present = [
            (StudyKind::DenselySpaced, self.densely_spaced.is_some()),
            (StudyKind::NearField, self.near_field.is_some()),
            (StudyKind::TriPol, self.tri_pol.is_some()),
            (StudyKind::EmCoreValidation, self.em_core.is_some()),
        ];
        for (kind, is_set) in present {
            if is_set && kind != self.study {
                v.push(kind.section(), format!("section does not apply to a {} study", self.study.as_str()));
            }
        }
        let base = self.base_dir.as_path();
        if let Some(c) = &self.densely_spaced {
            check_dense(c, base, &mut v);
        }
        if let Some(c) = &self.near_field {
            check_near(c, base, &mut v);
        }
        if let Some(c) = &self.tri_pol {
            check_tripol(c, base, &mut v);
        }
        if let Some(c) = &self.em_core {
            check_emcore(c, &mut v);
        }
        v.errors
    }
}

#[derive(Default)]
struct Checker {
    errors: Vec<String>,
}

impl Checker {
    fn push(&mut self, field: &str, msg: String) {
        self.errors.push(format!("{field}: {msg}"));
    }

    fn finite(&mut self, field: &str, x: f64) -> bool {
        if x.is_finite() {
            true
        } else {
            self.push(field, format!("{x} is not finite"));
            false
        }
    }

    fn positive(&mut self, field: &str, x: f64) {
        if self.finite(field, x) && x <= 0.0 {
            self.push(field, format!("{x} must be positive"));
        }
    }

    fn nonnegative(&mut self, field: &str, x: f64) {
        if self.finite(field, x) && x < 0.0 {
            self.push(field, format!("{x} must not be negative"));
        }
    }

    fn count(&mut self, field: &str, n: usize) {
        if n == 0 {
            self.push(field, "must be at least 1".into());
        }
    }

    fn range(&mut self, field: &str, r: [f64; 2]) {
        if self.finite(field, r[0]) && self.finite(field, r[1]) && r[0] > r[1] {
            self.push(field, format!("lower bound {} exceeds upper bound {}", r[0], r[1]));
        }
    }

    fn cluster_table(&mut self, field: &str, reference: &str, base: &Path) {
        if let Err(e) = formats::load_cluster_table(reference, base, field) {
            self.errors.extend(e);
        }
    }
}

fn check_spectrum(field: &str, comps: &[SpectrumComponent], v: &mut Checker) {
    if comps.is_empty() {
        v.push(field, "needs at least one component".into());
        return;
    }
    let mut total = 0.0;
    for (i, c) in comps.iter().enumerate() {
        let f = format!("{field}[{i}]");
        v.nonnegative(&format!("{f}.weight"), c.weight);
        v.nonnegative(&format!("{f}.concentration"), c.concentration);
        if v.finite(&format!("{f}.zenith_deg"), c.zenith_deg) && !(0.0..=180.0).contains(&c.zenith_deg) {
            v.push(&format!("{f}.zenith_deg"), format!("{} outside [0, 180]", c.zenith_deg));
        }
        v.finite(&format!("{f}.azimuth_deg"), c.azimuth_deg);
        total += c.weight;
    }
    if (total - 1.0).abs() > 1e-12 {
        v.push(field, format!("mixture weights sum to {total}, expected 1"));
    }
}

fn check_dense(c: &DenseConfig, base: &Path, v: &mut Checker) {
    let s = "densely_spaced";
    v.positive(&format!("{s}.frequency_ghz"), c.frequency_ghz);
    v.finite(&format!("{s}.snr_db"), c.snr_db);
    v.count(&format!("{s}.realizations"), c.realizations);
    for (name, ap) in [("tx_aperture_wavelengths", c.tx_aperture_wavelengths), ("rx_aperture_wavelengths", c.rx_aperture_wavelengths)] {
        v.positive(&format!("{s}.{name}[0]"), ap[0]);
        v.positive(&format!("{s}.{name}[1]"), ap[1]);
    }
    v.positive(&format!("{s}.tx_spacing_wavelengths"), c.tx_spacing_wavelengths);
    if c.rx_spacings_wavelengths.is_empty() {
        v.push(&format!("{s}.rx_spacings_wavelengths"), "needs at least one spacing".into());
    }
    for (i, d) in c.rx_spacings_wavelengths.iter().enumerate() {
        v.positive(&format!("{s}.rx_spacings_wavelengths[{i}]"), *d);
    }
    if c.schemes.is_empty() {
        v.push(&format!("{s}.schemes"), "needs at least one scheme".into());
    }
    let eta = c.proposed_efficiency;
    if v.finite(&format!("{s}.proposed_efficiency"), eta) && !(eta > 0.0 && eta <= 1.0) {
        v.push(&format!("{s}.proposed_efficiency"), format!("{eta} outside (0, 1]"));
    }
    v.finite(&format!("{s}.xpr_mean_db"), c.xpr_mean_db);
    v.nonnegative(&format!("{s}.xpr_std_db"), c.xpr_std_db);
    for (name, spread) in [("rx_spread_deg", c.rx_spread_deg), ("tx_spread_deg", c.tx_spread_deg)] {
        if let Some(x) = spread {
            v.positive(&format!("{s}.{name}"), x);
        }
    }
    if let Some(m) = &c.rx_spectrum {
        check_spectrum(&format!("{s}.rx_spectrum"), m, v);
    }
    if let Some(m) = &c.tx_spectrum {
        check_spectrum(&format!("{s}.tx_spectrum"), m, v);
    }
    let needs_table = c.schemes.iter().any(|s| *s != Scheme::Ideal) && (c.rx_spectrum.is_none() || c.tx_spectrum.is_none());
    if needs_table {
        v.cluster_table(&format!("{s}.cluster_table"), &c.cluster_table, base);
    }
    c.rx_pattern.check(&format!("{s}.rx_pattern"), base, &mut v.errors);
    c.tx_pattern.check(&format!("{s}.tx_pattern"), base, &mut v.errors);
    if !(1..=64).contains(&c.quadrature_order) {
        v.push(&format!("{s}.quadrature_order"), format!("{} outside [1, 64]", c.quadrature_order));
    }
}

fn check_near(c: &NearFieldConfig, base: &Path, v: &mut Checker) {
    let s = "near_field";
    v.count(&format!("{s}.bs_rows"), c.bs_rows);
    v.count(&format!("{s}.bs_columns"), c.bs_columns);
    v.nonnegative(&format!("{s}.bs_height_m"), c.bs_height_m);
    c.bs_pattern.check(&format!("{s}.bs_pattern"), base, &mut v.errors);
    c.ue_pattern.check(&format!("{s}.ue_pattern"), base, &mut v.errors);
    v.finite(&format!("{s}.ue_lateral_offset_m"), c.ue_lateral_offset_m);
    v.nonnegative(&format!("{s}.ue_height_m"), c.ue_height_m);
    for (i, d) in c.ue_distances_m.iter().enumerate() {
        v.positive(&format!("{s}.ue_distances_m[{i}]"), *d);
    }
    for (i, d) in c.phase_profile_distances_m.iter().enumerate() {
        v.positive(&format!("{s}.phase_profile_distances_m[{i}]"), *d);
    }
    if c.ue_distances_m.is_empty() && c.phase_profile_distances_m.is_empty() && c.random_ues == 0 {
        v.push(s, "no distances, phase profiles or random drops requested".into());
    }
    v.range(&format!("{s}.drop_distance_range_m"), c.drop_distance_range_m);
    if c.drop_distance_range_m[0] <= 0.0 {
        v.push(&format!("{s}.drop_distance_range_m"), "distances must be positive".into());
    }
    v.range(&format!("{s}.drop_lateral_range_m"), c.drop_lateral_range_m);
    v.finite(&format!("{s}.k_factor_db"), c.k_factor_db);
    v.nonnegative(&format!("{s}.delay_spread_ns"), c.delay_spread_ns);
    v.nonnegative(&format!("{s}.xpr_std_db"), c.xpr_std_db);
    if c.random_ues > 0 {
        v.cluster_table(&format!("{s}.cluster_table"), &c.cluster_table, base);
    }
    let vis = &c.visibility;
    if let Err(e) = vis.model().validate() {
        v.push(&format!("{s}.visibility"), e.to_string());
    }
    if c.time_samples_s.is_empty() {
        v.push(&format!("{s}.time_samples_s"), "needs at least one time".into());
    }
    for (i, t) in c.time_samples_s.iter().enumerate() {
        v.finite(&format!("{s}.time_samples_s[{i}]"), *t);
    }
    for (i, x) in c.ue_velocity_mps.iter().enumerate() {
        v.finite(&format!("{s}.ue_velocity_mps[{i}]"), *x);
    }
    if c.carriers.is_empty() {
        v.push(&format!("{s}.carriers"), "needs at least one carrier".into());
    }
    for (i, k) in c.carriers.iter().enumerate() {
        let f = format!("{s}.carriers[{i}]");
        v.positive(&format!("{f}.frequency_ghz"), k.frequency_ghz);
        v.nonnegative(&format!("{f}.aperture_width_m"), k.aperture_width_m);
        v.nonnegative(&format!("{f}.aperture_height_m"), k.aperture_height_m);
        if let Some(g) = &k.geometry_file {
            if let Err(e) = formats::load_geometry(g, base, &format!("{f}.geometry_file")) {
                v.errors.extend(e);
            }
        } else if k.aperture_width_m == 0.0 && k.aperture_height_m == 0.0 && c.bs_rows * c.bs_columns > 1 {
            v.push(&f, "a multi-element array needs a nonzero aperture".into());
        }
    }
}

fn check_tripol(c: &TriPolConfig, base: &Path, v: &mut Checker) {
    let s = "tri_pol";
    v.positive(&format!("{s}.frequency_ghz"), c.frequency_ghz);
    v.count(&format!("{s}.ues"), c.ues);
    v.count(&format!("{s}.bs_rows"), c.bs_rows);
    v.count(&format!("{s}.bs_columns"), c.bs_columns);
    v.nonnegative(&format!("{s}.bs_width_m"), c.bs_width_m);
    v.nonnegative(&format!("{s}.bs_height_m"), c.bs_height_m);
    let bw = c.bs_element_beamwidth_deg;
    if v.finite(&format!("{s}.bs_element_beamwidth_deg"), bw) && !(bw > 0.0 && bw < 180.0) {
        v.push(&format!("{s}.bs_element_beamwidth_deg"), format!("{bw} outside (0, 180)"));
    }
    v.finite(&format!("{s}.bs_slant_deg"), c.bs_slant_deg);
    v.count(&format!("{s}.ue_rows"), c.ue_rows);
    v.count(&format!("{s}.ue_columns"), c.ue_columns);
    v.positive(&format!("{s}.ue_spacing_wavelengths"), c.ue_spacing_wavelengths);
    v.finite(&format!("{s}.third_port_gain_db"), c.third_port_gain_db);
    if let Some(t) = &c.bs_pattern_tables {
        if t.len() != 2 {
            v.push(&format!("{s}.bs_pattern_tables"), format!("expects 2 tables, found {}", t.len()));
        }
        for (i, f) in t.iter().enumerate() {
            if let Err(e) = formats::load_pattern_table(f, base, &format!("{s}.bs_pattern_tables[{i}]")) {
                v.errors.extend(e);
            }
        }
    }
    if let Some(t) = &c.ue_pattern_tables {
        if t.len() != 3 {
            v.push(&format!("{s}.ue_pattern_tables"), format!("expects 3 tables, found {}", t.len()));
        }
        for (i, f) in t.iter().enumerate() {
            if let Err(e) = formats::load_pattern_table(f, base, &format!("{s}.ue_pattern_tables[{i}]")) {
                v.errors.extend(e);
            }
        }
    }
    v.finite(&format!("{s}.bs_power_dbm"), c.bs_power_dbm);
    v.finite(&format!("{s}.ue_power_dbm"), c.ue_power_dbm);
    v.finite(&format!("{s}.uplink_snr_db"), c.uplink_snr_db);
    v.finite(&format!("{s}.data_snr_db"), c.data_snr_db);
    let ports = 3 * c.ue_rows * c.ue_columns;
    if c.streams == 0 || c.streams > ports {
        v.push(&format!("{s}.streams"), format!("{} outside [1, {ports}]", c.streams));
    }
    if let Some(t) = c.grouping_threshold {
        if !(t > 0.0 && t <= 1.0) {
            v.push(&format!("{s}.grouping_threshold"), format!("{t} outside (0, 1]"));
        }
    }
    if let Some(b) = c.feedback_bits {
        if !(1..=52).contains(&b) {
            v.push(&format!("{s}.feedback_bits"), format!("{b} outside [1, 52]"));
        }
    }
    v.nonnegative(&format!("{s}.aod_rotation_deg"), c.aod_rotation_deg);
    v.nonnegative(&format!("{s}.aoa_rotation_deg"), c.aoa_rotation_deg);
    v.nonnegative(&format!("{s}.delay_spread_ns"), c.delay_spread_ns);
    v.nonnegative(&format!("{s}.xpr_std_db"), c.xpr_std_db);
    v.cluster_table(&format!("{s}.cluster_table"), &c.cluster_table, base);
    if c.cdf_points < 2 {
        v.push(&format!("{s}.cdf_points"), "must be at least 2".into());
    }
}

fn check_emcore(c: &EmCoreConfig, v: &mut Checker) {
    let s = "em_core";
    v.positive(&format!("{s}.frequency_ghz"), c.frequency_ghz);
    v.count(&format!("{s}.pairs"), c.pairs);
    v.range(&format!("{s}.k0r_range"), c.k0r_range);
    if c.k0r_range[0] <= 0.0 {
        v.push(&format!("{s}.k0r_range"), "must be positive".into());
    }
    v.count(&format!("{s}.ports"), c.ports);
    v.positive(&format!("{s}.port_spacing_wavelengths"), c.port_spacing_wavelengths);
    v.positive(&format!("{s}.link_distance_m"), c.link_distance_m);
    for (i, a) in c.apertures.iter().enumerate() {
        v.positive(&format!("{s}.apertures[{i}].frequency_ghz"), a.frequency_ghz);
        v.positive(&format!("{s}.apertures[{i}].aperture_m"), a.aperture_m);
    }
}

/// Reads, parses and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SimError::Validation(vec![format!("{}: {e}", path.display())]))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let base = if base.as_os_str().is_empty() { PathBuf::from(".") } else { base };
    Scenario::from_toml_str(&text, &base).map_err(|e| match e {
        SimError::Validation(errs) => {
            SimError::Validation(errs.into_iter().map(|m| format!("{}: {m}", path.display())).collect())
        }
        other => other,
    })
}

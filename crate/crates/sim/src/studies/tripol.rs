//! Channel acquisition for tri-polarized UEs: the joint uplink/downlink
//! protocol against uplink-only estimation.
//!
//! Each UE position carries three orthogonal dipoles; the one along the
//! facing axis is attenuated. Strong ports are sounded on the uplink, weak
//! ones are measured on the downlink and stitched on.

use std::f64::consts::PI;

use eit_core::capacity::EnsembleStats;
use eit_core::cdl::CdlTable;
use eit_core::nearfield::{rays_from_cdl, ArrayElement};
use eit_core::pattern::{PatternSet, PatternShape};
use eit_core::rng::{derive_seed, rng_from_seed, stream_id};
use eit_core::tripol::{
    benchmark_uplink_only, group_ports, planar_cluster_channel, port_normalized_error, port_powers,
    precoded_capacity, run_protocol, GroupingRule, PilotProfile, ProtocolConfig,
};
use eit_core::{Position3, WaveContext};
use rand::Rng;

use super::{invalid, item_seed, sub_seed, Plot, TableOutput};
use crate::error::{Result, SimError};
use crate::formats;
use crate::runner::map_indexed;
use crate::scenario::{Scenario, TriPolConfig};
use crate::table::ResultTable;

fn table_patterns(files: &[String], base: &std::path::Path, field: &str) -> Result<Vec<PatternSet>> {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    for (i, f) in files.iter().enumerate() {
        match formats::load_pattern_table(f, base, &format!("{field}[{i}]")) {
            Ok(t) => out.push(PatternSet::new(PatternShape::Table(t))),
            Err(e) => errors.extend(e),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(invalid(errors))
    }
}

fn bs_elements(cfg: &TriPolConfig, base: &std::path::Path) -> Result<Vec<ArrayElement>> {
    let slants = match &cfg.bs_pattern_tables {
        Some(files) => table_patterns(files, base, "tri_pol.bs_pattern_tables")?,
        None => [cfg.bs_slant_deg, -cfg.bs_slant_deg]
            .iter()
            .map(|s| PatternSet::directional(cfg.bs_element_beamwidth_deg.to_radians(), PI / 2.0, 0.0, s.to_radians()))
            .collect(),
    };
    let step = |len: f64, n: usize| if n > 1 { len / (n - 1) as f64 } else { 0.0 };
    let (dy, dz) = (step(cfg.bs_width_m, cfg.bs_columns), step(cfg.bs_height_m, cfg.bs_rows));
    let mut out = Vec::with_capacity(2 * cfg.bs_rows * cfg.bs_columns);
    for r in 0..cfg.bs_rows {
        for c in 0..cfg.bs_columns {
            let position = Position3::new(0.0, c as f64 * dy, r as f64 * dz);
            out.extend(slants.iter().map(|p| ArrayElement {
                position,
                pattern: p.clone(),
            }));
        }
    }
    Ok(out)
}

/// Ports of one UE, three per position: horizontal, vertical, facing.
fn ue_elements(cfg: &TriPolConfig, lambda: f64, face: f64, tables: Option<&[PatternSet]>) -> Vec<ArrayElement> {
    let (s, c) = face.sin_cos();
    let third = 10f64.powf(cfg.third_port_gain_db / 20.0);
    let ports = match tables {
        Some(t) => vec![t[0].clone(), t[1].clone(), t[2].clone().with_amplitude(third)],
        None => vec![
            PatternSet::dipole(Position3::new(-s, c, 0.0)),
            PatternSet::dipole(Position3::new(0.0, 0.0, 1.0)),
            PatternSet::dipole(Position3::new(c, s, 0.0)).with_amplitude(third),
        ],
    };
    let d = cfg.ue_spacing_wavelengths * lambda;
    let mut out = Vec::with_capacity(3 * cfg.ue_rows * cfg.ue_columns);
    for r in 0..cfg.ue_rows {
        for col in 0..cfg.ue_columns {
            let position = Position3::new(0.0, col as f64 * d, r as f64 * d);
            out.extend(ports.iter().map(|p| ArrayElement {
                position,
                pattern: p.clone(),
            }));
        }
    }
    out
}

struct UeResult {
    face: f64,
    rot_d: f64,
    rot_a: f64,
    strong: usize,
    weak: usize,
    joint: f64,
    uplink: f64,
    joint_error: f64,
    uplink_error: f64,
}

pub fn run(scenario: &Scenario) -> Result<Vec<TableOutput>> {
    let cfg = scenario.tripol();
    let base = scenario.base_dir.as_path();
    let ctx = WaveContext::new(cfg.frequency_ghz * 1e9).map_err(SimError::model("tri_pol.frequency_ghz"))?;
    let lambda = ctx.wavelength();
    let table: CdlTable = formats::load_cluster_table(&cfg.cluster_table, base, "tri_pol.cluster_table").map_err(invalid)?;
    let bs = bs_elements(cfg, base)?;
    let ue_tables = match &cfg.ue_pattern_tables {
        Some(files) => Some(table_patterns(files, base, "tri_pol.ue_pattern_tables")?),
        None => None,
    };
    let protocol = ProtocolConfig {
        uplink_snr_db: cfg.uplink_snr_db,
        downlink_snr_db: cfg.downlink_snr_db(),
        feedback_bits: cfg.feedback_bits,
    };
    let rule = match cfg.grouping_threshold {
        Some(f) => GroupingRule::Threshold(f),
        None => GroupingRule::Median,
    };
    let data_snr = 10f64.powf(cfg.data_snr_db / 10.0);
    let n = scenario.scaled(cfg.ues);

    let results = map_indexed(n, |i| {
        let seed = item_seed(scenario, i);
        let what = format!("UE {i}");
        let mut rng = rng_from_seed(sub_seed(seed, "orientation"));
        let face = if ue_tables.is_some() { 0.0 } else { rng.random_range(-PI..PI) };
        let rot_d = cfg.aod_rotation_deg * (2.0 * rng.random::<f64>() - 1.0);
        let rot_a = cfg.aoa_rotation_deg * (2.0 * rng.random::<f64>() - 1.0);
        let mut t = table.clone();
        for c in &mut t.clusters {
            c.aod_deg += rot_d;
            c.aoa_deg += rot_a;
        }
        let ue = ue_elements(cfg, lambda, face, ue_tables.as_deref());
        let rays = rays_from_cdl(&t, 0.0, 1e-9, cfg.delay_spread_ns * 1e-9, cfg.xpr_std_db, sub_seed(seed, "rays"))
            .map_err(SimError::model(&what))?;
        let h = planar_cluster_channel(&ue, &bs, &rays, &ctx).map_err(SimError::model(&what))?;
        let grouping = group_ports(&port_powers(&h), rule).map_err(SimError::model(&what))?;
        let protocol_seed = sub_seed(seed, "protocol");
        let est = run_protocol(&h, &grouping, &protocol, protocol_seed).map_err(SimError::model(&what))?;
        // same uplink noise as the protocol's strong-port sounding
        let bench = benchmark_uplink_only(
            &h,
            &PilotProfile::uniform(h.rows(), cfg.uplink_snr_db),
            derive_seed(protocol_seed, stream_id("uplink"), 0),
        )
        .map_err(SimError::model(&what))?;
        let cap = |e| precoded_capacity(&h, e, cfg.streams, data_snr).map_err(SimError::model(&what));
        let err = |e| port_normalized_error(e, &h).map_err(SimError::model(&what));
        Ok(UeResult {
            face,
            rot_d,
            rot_a,
            strong: grouping.strong.len(),
            weak: grouping.weak.len(),
            joint: cap(&est.assembled)?,
            uplink: cap(&bench)?,
            joint_error: err(&est.assembled)?,
            uplink_error: err(&bench)?,
        })
    })?;

    let mut per_ue = ResultTable::new(
        "ue_results",
        &[
            ("ue", "count"),
            ("facing_azimuth", "deg"),
            ("departure_rotation", "deg"),
            ("arrival_rotation", "deg"),
            ("strong_ports", "count"),
            ("weak_ports", "count"),
            ("capacity_joint", "bit/s/Hz"),
            ("capacity_uplink_only", "bit/s/Hz"),
            ("error_joint", "1"),
            ("error_uplink_only", "1"),
        ],
    );
    for (i, r) in results.iter().enumerate() {
        per_ue.push(vec![
            i.into(),
            r.face.to_degrees().into(),
            r.rot_d.into(),
            r.rot_a.into(),
            r.strong.into(),
            r.weak.into(),
            r.joint.into(),
            r.uplink.into(),
            r.joint_error.into(),
            r.uplink_error.into(),
        ]);
    }

    let stats = |f: fn(&UeResult) -> f64| EnsembleStats::from_capacities(results.iter().map(f).collect()).map_err(SimError::model("capacity statistics"));
    let joint = stats(|r| r.joint)?;
    let uplink = stats(|r| r.uplink)?;

    let mut cdf = ResultTable::new(
        "capacity_cdf",
        &[
            ("probability", "1"),
            ("capacity_joint", "bit/s/Hz"),
            ("capacity_uplink_only", "bit/s/Hz"),
        ],
    );
    let points = cfg.cdf_points.max(2);
    for k in 0..points {
        let p = k as f64 / (points - 1) as f64;
        cdf.push(vec![p.into(), joint.quantile(p).into(), uplink.quantile(p).into()]);
    }

    let mut summary = ResultTable::new(
        "capacity_summary",
        &[
            ("scheme", "text"),
            ("ues", "count"),
            ("capacity_mean", "bit/s/Hz"),
            ("capacity_std", "bit/s/Hz"),
            ("capacity_median", "bit/s/Hz"),
            ("error_mean", "1"),
        ],
    );
    for (name, s, e) in [
        ("joint", &joint, results.iter().map(|r| r.joint_error).sum::<f64>()),
        ("uplink-only", &uplink, results.iter().map(|r| r.uplink_error).sum::<f64>()),
    ] {
        summary.push(vec![
            name.into(),
            n.into(),
            s.mean().into(),
            s.std_dev().into(),
            s.quantile(0.5).into(),
            (e / n as f64).into(),
        ]);
    }
    log::info!("mean capacity: joint {:.3}, uplink-only {:.3} bit/s/Hz", joint.mean(), uplink.mean());

    Ok(vec![
        TableOutput {
            table: cdf,
            description: "empirical quantiles of the precoded capacity over UEs",
            plot: Some(Plot {
                x: "probability",
                y: &["capacity_joint", "capacity_uplink_only"],
                series: None,
            }),
        },
        TableOutput {
            table: per_ue,
            description: "per-UE port grouping, estimation error and precoded capacity",
            plot: None,
        },
        TableOutput {
            table: summary,
            description: "capacity and estimation error statistics per acquisition scheme",
            plot: None,
        },
    ])
}

//! Planar versus spherical wavefront correlation for large base-station arrays.
//!
//! The base station transmits from the x = 0 plane toward +x; its first
//! element is the phase reference. UEs carry a single element.

use eit_core::cdl::{CdlTable, LinkEnd};
use eit_core::green::rayleigh_distance;
use eit_core::nearfield::{
    narrowband_channel, rays_from_cdl, spatial_correlation, ArrayElement, ArrayGeometry, Attenuation,
    NearFieldLink, Wavefront,
};
use eit_core::pattern::PatternSet;
use eit_core::rng::rng_from_seed;
use eit_core::wave::SPEED_OF_LIGHT;
use eit_core::{CMatrix, Position3, WaveContext};
use rand::Rng;

use super::{invalid, item_seed, sub_seed, Plot, TableOutput};
use crate::error::{Result, SimError};
use crate::formats;
use crate::runner::map_indexed;
use crate::scenario::{CarrierConfig, NearFieldConfig, Scenario};
use crate::table::{Cell, ResultTable};

/// Base-station element positions for one carrier.
pub fn bs_positions(cfg: &NearFieldConfig, carrier: &CarrierConfig, base: &std::path::Path) -> Result<Vec<Position3>> {
    if let Some(file) = &carrier.geometry_file {
        let pts = formats::load_geometry(file, base, "near_field.carriers.geometry_file").map_err(invalid)?;
        return Ok(pts.into_iter().map(|p| Position3::new(p.x, p.y, p.z + cfg.bs_height_m)).collect());
    }
    let step = |len: f64, n: usize| if n > 1 { len / (n - 1) as f64 } else { 0.0 };
    let dy = step(carrier.aperture_width_m, cfg.bs_columns);
    let dz = step(carrier.aperture_height_m, cfg.bs_rows);
    Ok((0..cfg.bs_rows)
        .flat_map(|r| (0..cfg.bs_columns).map(move |c| Position3::new(0.0, c as f64 * dy, cfg.bs_height_m + r as f64 * dz)))
        .collect())
}

/// Largest distance between two elements.
pub fn aperture_extent(points: &[Position3]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d = d.max(a.distance(b));
        }
    }
    d
}

struct Carrier {
    ctx: WaveContext,
    frequency_ghz: f64,
    bs: Vec<ArrayElement>,
    rayleigh: f64,
}

fn geometry(carrier: &Carrier, ue: Position3, ue_pattern: &PatternSet) -> Result<ArrayGeometry> {
    let rx = vec![ArrayElement {
        position: ue,
        pattern: ue_pattern.clone(),
    }];
    ArrayGeometry::new(carrier.bs.clone(), rx).map_err(SimError::model("near-field geometry"))
}

fn first_row(m: &CMatrix) -> &[eit_core::Complex64] {
    m.row(0)
}

fn correlation(link: &NearFieldLink, att: &Attenuation, t: f64, ctx: &WaveContext, what: &str) -> Result<f64> {
    let sph = narrowband_channel(link, att, t, Wavefront::Spherical, ctx).map_err(SimError::model(what))?;
    let pl = narrowband_channel(link, att, t, Wavefront::Planar, ctx).map_err(SimError::model(what))?;
    spatial_correlation(first_row(&pl), first_row(&sph)).map_err(SimError::model(what))
}

/// Rotates the table azimuths so the strongest cluster departs toward the UE
/// and arrives from the base station.
fn steer_table(table: &CdlTable, bs: Position3, ue: Position3) -> CdlTable {
    let toward_ue = (ue.y - bs.y).atan2(ue.x - bs.x).to_degrees();
    let rot_d = toward_ue - table.boresight(LinkEnd::Departure).to_degrees();
    let rot_a = toward_ue + 180.0 - table.boresight(LinkEnd::Arrival).to_degrees();
    let mut t = table.clone();
    for c in &mut t.clusters {
        c.aod_deg += rot_d;
        c.aoa_deg += rot_a;
    }
    t
}

pub fn run(scenario: &Scenario) -> Result<Vec<TableOutput>> {
    let cfg = scenario.near();
    let base = scenario.base_dir.as_path();
    let bs_pattern = cfg.bs_pattern.resolve(base, "near_field.bs_pattern").map_err(invalid)?;
    let ue_pattern = cfg.ue_pattern.resolve(base, "near_field.ue_pattern").map_err(invalid)?;
    let velocity = Position3::new(cfg.ue_velocity_mps[0], cfg.ue_velocity_mps[1], cfg.ue_velocity_mps[2]);
    let ue_at = |d: f64| Position3::new(d, cfg.ue_lateral_offset_m, cfg.ue_height_m);

    let mut carriers = Vec::with_capacity(cfg.carriers.len());
    for (i, c) in cfg.carriers.iter().enumerate() {
        let ctx = WaveContext::new(c.frequency_ghz * 1e9).map_err(SimError::model(format!("near_field.carriers[{i}]")))?;
        let positions = bs_positions(cfg, c, base)?;
        let rayleigh = rayleigh_distance(aperture_extent(&positions), &ctx);
        let bs = positions
            .into_iter()
            .map(|position| ArrayElement {
                position,
                pattern: bs_pattern.clone(),
            })
            .collect();
        carriers.push(Carrier {
            ctx,
            frequency_ghz: c.frequency_ghz,
            bs,
            rayleigh,
        });
    }

    let mut sweep = ResultTable::new(
        "correlation_vs_distance",
        &[
            ("carrier_frequency", "GHz"),
            ("ue", "count"),
            ("ue_x", "m"),
            ("ue_y", "m"),
            ("ue_z", "m"),
            ("distance", "m"),
            ("rayleigh_distance", "m"),
            ("time", "s"),
            ("correlation", "1"),
        ],
    );
    let mut profile = ResultTable::new(
        "phase_profile",
        &[
            ("carrier_frequency", "GHz"),
            ("distance", "m"),
            ("element", "count"),
            ("element_y", "m"),
            ("element_z", "m"),
            ("path_difference", "m"),
            ("spherical_phase", "rad"),
            ("planar_phase", "rad"),
        ],
    );
    let mut drops = ResultTable::new(
        "correlation_drops",
        &[
            ("carrier_frequency", "GHz"),
            ("ue", "count"),
            ("ue_x", "m"),
            ("ue_y", "m"),
            ("ue_z", "m"),
            ("distance", "m"),
            ("k_factor", "dB"),
            ("time", "s"),
            ("correlation", "1"),
        ],
    );

    let n_drops = if cfg.random_ues > 0 { scenario.scaled(cfg.random_ues) } else { 0 };
    let table = if n_drops > 0 {
        Some(formats::load_cluster_table(&cfg.cluster_table, base, "near_field.cluster_table").map_err(invalid)?)
    } else {
        None
    };

    for carrier in &carriers {
        let ctx = &carrier.ctx;
        let nt = carrier.bs.len();
        let label = format!("{} GHz", carrier.frequency_ghz);

        // line-of-sight sweep
        let rows = map_indexed(cfg.ue_distances_m.len(), |i| {
            let ue = ue_at(cfg.ue_distances_m[i]);
            let link = NearFieldLink::new(geometry(carrier, ue, &ue_pattern)?, Vec::new(), f64::INFINITY, velocity, ctx)
                .map_err(SimError::model(format!("{label} LOS link")))?;
            let att = Attenuation::unity(0, nt);
            cfg.time_samples_s
                .iter()
                .map(|&t| {
                    let rho = correlation(&link, &att, t, ctx, &format!("{label} UE at {} m", cfg.ue_distances_m[i]))?;
                    Ok(vec![
                        carrier.frequency_ghz.into(),
                        i.into(),
                        ue.x.into(),
                        ue.y.into(),
                        ue.z.into(),
                        link.geometry.reference_distance().into(),
                        carrier.rayleigh.into(),
                        t.into(),
                        rho.into(),
                    ])
                })
                .collect::<Result<Vec<Vec<Cell>>>>()
        })?;
        rows.into_iter().flatten().for_each(|r| sweep.push(r));

        // per-element phases relative to the reference element
        let t0 = cfg.time_samples_s[0];
        for &d in &cfg.phase_profile_distances_m {
            let ue = ue_at(d);
            let link = NearFieldLink::new(geometry(carrier, ue, &ue_pattern)?, Vec::new(), f64::INFINITY, velocity, ctx)
                .map_err(SimError::model(format!("{label} phase profile")))?;
            let att = Attenuation::unity(0, nt);
            let what = format!("{label} phase profile at {d} m");
            let sph = narrowband_channel(&link, &att, t0, Wavefront::Spherical, ctx).map_err(SimError::model(&what))?;
            let pl = narrowband_channel(&link, &att, t0, Wavefront::Planar, ctx).map_err(SimError::model(&what))?;
            let (sph, pl) = (first_row(&sph), first_row(&pl));
            let d0 = carrier.bs[0].position.distance(&ue);
            for (s, el) in carrier.bs.iter().enumerate() {
                profile.push(vec![
                    carrier.frequency_ghz.into(),
                    d.into(),
                    s.into(),
                    el.position.y.into(),
                    (el.position.z - cfg.bs_height_m).into(),
                    (el.position.distance(&ue) - d0).into(),
                    (sph[s] * sph[0].conj()).arg().into(),
                    (pl[s] * pl[0].conj()).arg().into(),
                ]);
            }
        }

        // random drops with scattering and visibility
        if let Some(table) = &table {
            let k_lin = 10f64.powf(cfg.k_factor_db / 10.0);
            let model = cfg.visibility.model();
            let rows = map_indexed(n_drops, |i| {
                let seed = item_seed(scenario, i);
                let mut rng = rng_from_seed(sub_seed(seed, "position"));
                let [d_lo, d_hi] = cfg.drop_distance_range_m;
                let [y_lo, y_hi] = cfg.drop_lateral_range_m;
                let d = d_lo + (d_hi - d_lo) * rng.random::<f64>();
                let y = y_lo + (y_hi - y_lo) * rng.random::<f64>();
                let ue = Position3::new(d, y, cfg.ue_height_m);
                let what = format!("{label} drop {i}");
                let geom = geometry(carrier, ue, &ue_pattern)?;
                let steered = steer_table(table, carrier.bs[0].position, ue);
                let los_delay = geom.reference_distance() / SPEED_OF_LIGHT;
                let rays = rays_from_cdl(
                    &steered,
                    los_delay,
                    1e-9,
                    cfg.delay_spread_ns * 1e-9,
                    cfg.xpr_std_db,
                    sub_seed(seed, "rays"),
                )
                .map_err(SimError::model(&what))?;
                let link = NearFieldLink::new(geom, rays, k_lin, velocity, ctx).map_err(SimError::model(&what))?;
                let att = Attenuation::draw(&link.geometry, &link.rays, &link.bounces, &model, sub_seed(seed, "visibility"))
                    .map_err(SimError::model(&what))?;
                cfg.time_samples_s
                    .iter()
                    .map(|&t| {
                        let rho = correlation(&link, &att, t, ctx, &what)?;
                        Ok(vec![
                            carrier.frequency_ghz.into(),
                            i.into(),
                            ue.x.into(),
                            ue.y.into(),
                            ue.z.into(),
                            link.geometry.reference_distance().into(),
                            cfg.k_factor_db.into(),
                            t.into(),
                            rho.into(),
                        ])
                    })
                    .collect::<Result<Vec<Vec<Cell>>>>()
            })?;
            rows.into_iter().flatten().for_each(|r| drops.push(r));
        }
        log::info!("{label}: Rayleigh distance {:.1} m", carrier.rayleigh);
    }

    let mut out = vec![
        TableOutput {
            table: sweep,
            description: "line-of-sight correlation between planar and spherical wavefront channels against UE distance",
            plot: Some(Plot {
                x: "distance",
                y: &["correlation"],
                series: Some("carrier_frequency"),
            }),
        },
        TableOutput {
            table: profile,
            description: "phase of each base-station element relative to the reference element",
            plot: Some(Plot {
                x: "element",
                y: &["spherical_phase", "planar_phase"],
                series: Some("distance"),
            }),
        },
    ];
    if n_drops > 0 {
        out.push(TableOutput {
            table: drops,
            description: "wavefront correlation of random UE drops with scattering and cluster visibility",
            plot: Some(Plot {
                x: "distance",
                y: &["correlation"],
                series: Some("carrier_frequency"),
            }),
        });
    }
    Ok(out)
}

//! Consistency checks of the electromagnetic channel core: Green's function
//! decomposition, point-port degeneration and field-region boundaries.

use eit_core::emchannel::{assemble_em_channel, Aperture, PortFunction, PortKind};
use eit_core::green::{dyadic_green, green_decomposition, rayleigh_distance, reactive_boundary};
use eit_core::rng::{rng_from_seed, standard_normal};
use eit_core::{Complex64, Position3, WaveContext};
use rand::Rng;

use super::{item_seed, Plot, TableOutput};
use crate::error::{Result, SimError};
use crate::runner::map_indexed;
use crate::scenario::Scenario;
use crate::table::ResultTable;

fn unit(i: usize) -> [Complex64; 3] {
    let mut v = [Complex64::new(0.0, 0.0); 3];
    v[i] = Complex64::new(1.0, 0.0);
    v
}

pub fn run(scenario: &Scenario) -> Result<Vec<TableOutput>> {
    let cfg = scenario.emcore();
    let ctx = WaveContext::new(cfg.frequency_ghz * 1e9).map_err(SimError::model("em_core.frequency_ghz"))?;
    let k = ctx.wavenumber();

    let mut decomposition = ResultTable::new(
        "decomposition",
        &[
            ("pair", "count"),
            ("k0r", "1"),
            ("separation", "m"),
            ("relative_error", "1"),
            ("reactive_ratio", "1"),
            ("radiating_ratio", "1"),
            ("far_ratio", "1"),
        ],
    );
    let [lo, hi] = cfg.k0r_range.map(f64::ln);
    let rows = map_indexed(scenario.scaled(cfg.pairs), |i| {
        let mut rng = rng_from_seed(item_seed(scenario, i));
        let kr = (lo + (hi - lo) * rng.random::<f64>()).exp();
        let s = Position3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let dir = loop {
            let d = Position3::new(standard_normal(&mut rng), standard_normal(&mut rng), standard_normal(&mut rng));
            if let Some(u) = d.normalized() {
                break u;
            }
        };
        let r = s + dir * (kr / k);
        let what = format!("pair {i}");
        let full = dyadic_green(r, s, &ctx).map_err(SimError::model(&what))?;
        let parts = green_decomposition(r, s, &ctx).map_err(SimError::model(&what))?;
        let norm = full.frobenius_norm();
        Ok(vec![
            i.into(),
            kr.into(),
            r.distance(&s).into(),
            ((parts.sum() - full).frobenius_norm() / norm).into(),
            (parts.inf.frobenius_norm() / norm).into(),
            (parts.rnf.frobenius_norm() / norm).into(),
            (parts.ff.frobenius_norm() / norm).into(),
        ])
    })?;
    rows.into_iter().for_each(|r| decomposition.push(r));

    // point ports on two parallel lines, one port per position and axis
    let spacing = cfg.port_spacing_wavelengths * ctx.wavelength();
    let rx_points: Vec<Position3> = (0..cfg.ports).map(|m| Position3::new(cfg.link_distance_m, m as f64 * spacing, 0.0)).collect();
    let tx_points: Vec<Position3> = (0..cfg.ports).map(|n| Position3::new(0.0, n as f64 * spacing, 0.0)).collect();
    let ar = Aperture::discrete(rx_points.clone()).map_err(SimError::model("receive ports"))?;
    let at = Aperture::discrete(tx_points.clone()).map_err(SimError::model("transmit ports"))?;
    let ports = |len: usize, kind| -> Vec<PortFunction> {
        (0..len)
            .flat_map(|m| (0..3).map(move |a| PortFunction::delta(len, m, unit(a), kind)))
            .collect()
    };
    let h = assemble_em_channel(&ports(cfg.ports, PortKind::Combining), &ports(cfg.ports, PortKind::Precoding), &ar, &at, &ctx)
        .map_err(SimError::model("point-port channel"))?;
    let h = h.matrix();
    let pre = Complex64::new(0.0, -ctx.angular_frequency() * ctx.permeability());
    let mut degeneration = ResultTable::new(
        "degeneration",
        &[
            ("rx_port", "count"),
            ("tx_port", "count"),
            ("rx_axis", "count"),
            ("tx_axis", "count"),
            ("channel_re", "ohm/m^2"),
            ("channel_im", "ohm/m^2"),
            ("green_re", "ohm/m^2"),
            ("green_im", "ohm/m^2"),
            ("relative_difference", "1"),
        ],
    );
    for (m, rp) in rx_points.iter().enumerate() {
        for (n, tp) in tx_points.iter().enumerate() {
            let g = dyadic_green(*rp, *tp, &ctx).map_err(SimError::model("point-port Green's function"))?;
            let scale = (g * pre).frobenius_norm();
            for a in 0..3 {
                for b in 0..3 {
                    let direct = pre * g[(a, b)];
                    let value = h[(3 * m + a, 3 * n + b)];
                    degeneration.push(vec![
                        m.into(),
                        n.into(),
                        a.into(),
                        b.into(),
                        value.re.into(),
                        value.im.into(),
                        direct.re.into(),
                        direct.im.into(),
                        ((value - direct).norm() / scale).into(),
                    ]);
                }
            }
        }
    }

    let mut regions = ResultTable::new(
        "regions",
        &[
            ("frequency", "GHz"),
            ("aperture", "m"),
            ("wavelength", "m"),
            ("reactive_boundary", "m"),
            ("rayleigh_distance", "m"),
        ],
    );
    for (i, a) in cfg.apertures.iter().enumerate() {
        let c = WaveContext::new(a.frequency_ghz * 1e9).map_err(SimError::model(format!("em_core.apertures[{i}]")))?;
        regions.push(vec![
            a.frequency_ghz.into(),
            a.aperture_m.into(),
            c.wavelength().into(),
            reactive_boundary(a.aperture_m, &c).into(),
            rayleigh_distance(a.aperture_m, &c).into(),
        ]);
    }

    Ok(vec![
        TableOutput {
            table: decomposition,
            description: "relative size of the reactive, radiating and far-field parts of the dyadic Green's function",
            plot: Some(Plot {
                x: "k0r",
                y: &["reactive_ratio", "radiating_ratio", "far_ratio"],
                series: None,
            }),
        },
        TableOutput {
            table: degeneration,
            description: "point-port channel entries against the scaled dyadic Green's function",
            plot: None,
        },
        TableOutput {
            table: regions,
            description: "reactive near-field boundary and Rayleigh distance per aperture",
            plot: None,
        },
    ])
}

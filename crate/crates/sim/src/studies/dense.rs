//! Ergodic capacity of a densely spaced receive array against element spacing.

use std::path::Path;

use eit_core::capacity::{Allocation, EnsembleStats};
use eit_core::cdl::{concentration_from_spread, ArrayFrame, CdlTable, LinkEnd};
use eit_core::pattern::PatternSet;
use eit_core::wavenumber::{
    coupling_variances, wavenumber_support, CellQuadrature, CouplingVariances, DenseArrayModel,
    DenseArraySide, EfficiencyMatrix, PlanarArray, Side, VmfCluster, VmfMixture,
};
use eit_core::WaveContext;

use super::{invalid, item_seed, Plot, TableOutput};
use crate::error::{Result, SimError};
use crate::formats;
use crate::runner::map_indexed;
use crate::scenario::{DenseConfig, Scenario, Scheme, SpectrumComponent};
use crate::table::ResultTable;

fn explicit_spectrum(comps: &[SpectrumComponent], field: &str) -> Result<VmfMixture> {
    let clusters = comps
        .iter()
        .map(|c| VmfCluster {
            weight: c.weight,
            mean_theta: c.zenith_deg.to_radians(),
            mean_phi: c.azimuth_deg.to_radians(),
            concentration: c.concentration,
        })
        .collect();
    VmfMixture::new(clusters).map_err(SimError::model(field))
}

/// Angular spectra of the clustered channel at (receiver, transmitter).
fn clustered_spectra(cfg: &DenseConfig, base: &Path) -> Result<(VmfMixture, VmfMixture)> {
    let table: Option<CdlTable> = if cfg.rx_spectrum.is_none() || cfg.tx_spectrum.is_none() {
        Some(formats::load_cluster_table(&cfg.cluster_table, base, "densely_spaced.cluster_table").map_err(invalid)?)
    } else {
        None
    };
    let side = |explicit: &Option<Vec<SpectrumComponent>>, end: LinkEnd, spread: Option<f64>, field: &str| {
        if let Some(c) = explicit {
            return explicit_spectrum(c, field);
        }
        let t = table.as_ref().expect("loaded when a side has no explicit spectrum");
        let default_spread = match end {
            LinkEnd::Arrival => t.spreads.asa_deg,
            LinkEnd::Departure => t.spreads.asd_deg,
        };
        let alpha = concentration_from_spread(spread.unwrap_or(default_spread)).map_err(SimError::model(field))?;
        let frame = ArrayFrame::facing(t.boresight(end));
        t.angular_spectrum(end, &frame, alpha).map_err(SimError::model(field))
    };
    Ok((
        side(&cfg.rx_spectrum, LinkEnd::Arrival, cfg.rx_spread_deg, "densely_spaced.rx_spectrum")?,
        side(&cfg.tx_spectrum, LinkEnd::Departure, cfg.tx_spread_deg, "densely_spaced.tx_spectrum")?,
    ))
}

pub fn run(scenario: &Scenario) -> Result<Vec<TableOutput>> {
    let cfg = scenario.dense();
    let base = scenario.base_dir.as_path();
    let ctx = WaveContext::new(cfg.frequency_ghz * 1e9).map_err(SimError::model("densely_spaced.frequency_ghz"))?;
    let lambda = ctx.wavelength();
    let [rx_lx, rx_ly] = cfg.rx_aperture_wavelengths.map(|v| v * lambda);
    let [tx_lx, tx_ly] = cfg.tx_aperture_wavelengths.map(|v| v * lambda);
    let sup_r = wavenumber_support(rx_lx, rx_ly, &ctx, Side::Receiver).map_err(SimError::model("receive aperture"))?;
    let sup_s = wavenumber_support(tx_lx, tx_ly, &ctx, Side::Transmitter).map_err(SimError::model("transmit aperture"))?;
    let quad = CellQuadrature {
        order: cfg.quadrature_order,
    };

    let needs_iso = cfg.schemes.contains(&Scheme::Ideal);
    let needs_clustered = cfg.schemes.iter().any(|s| *s != Scheme::Ideal);
    let v_iso = if needs_iso {
        let iso = VmfMixture::isotropic();
        log::debug!("isotropic coupling variances");
        Some(coupling_variances(&sup_r, &sup_s, &iso, &iso, &ctx, quad).map_err(SimError::model("isotropic variances"))?)
    } else {
        None
    };
    let v_ni = if needs_clustered {
        let (aps_r, aps_s) = clustered_spectra(cfg, base)?;
        log::debug!("clustered coupling variances");
        Some(coupling_variances(&sup_r, &sup_s, &aps_r, &aps_s, &ctx, quad).map_err(SimError::model("clustered variances"))?)
    } else {
        None
    };
    let rx_pattern = cfg.rx_pattern.resolve(base, "densely_spaced.rx_pattern").map_err(invalid)?;
    let tx_pattern = cfg.tx_pattern.resolve(base, "densely_spaced.tx_pattern").map_err(invalid)?;

    let tx_spacing = cfg.tx_spacing_wavelengths * lambda;
    let tx_array = PlanarArray::uniform(tx_lx, tx_ly, tx_spacing, tx_spacing).map_err(SimError::model("transmit array"))?;
    let realizations = scenario.scaled(cfg.realizations);
    let power = 10f64.powf(cfg.snr_db / 10.0);

    let mut table = ResultTable::new(
        "capacity_vs_spacing",
        &[
            ("scheme", "text"),
            ("rx_spacing", "wavelength"),
            ("rx_elements", "count"),
            ("tx_elements", "count"),
            ("realizations", "count"),
            ("capacity_mean", "bit/s/Hz"),
            ("capacity_std", "bit/s/Hz"),
            ("capacity_stderr", "bit/s/Hz"),
        ],
    );
    for &spacing in &cfg.rx_spacings_wavelengths {
        let d = spacing * lambda;
        let rx_array = PlanarArray::uniform(rx_lx, rx_ly, d, d).map_err(SimError::model(format!("receive array at spacing {spacing}")))?;
        let (nr, ns) = (rx_array.len(), tx_array.len());
        for &scheme in &cfg.schemes {
            let context = format!("scheme {} at spacing {spacing} wavelengths", scheme.as_str());
            let (variances, patterns, eta): (&CouplingVariances, (PatternSet, PatternSet), f64) = match scheme {
                Scheme::Ideal => (v_iso.as_ref().unwrap(), (PatternSet::unit_dual(), PatternSet::unit_dual()), 1.0),
                Scheme::Ni => (v_ni.as_ref().unwrap(), (PatternSet::unit_dual(), PatternSet::unit_dual()), 1.0),
                Scheme::NiPd => (v_ni.as_ref().unwrap(), (rx_pattern.clone(), tx_pattern.clone()), 1.0),
                Scheme::Proposed => (v_ni.as_ref().unwrap(), (rx_pattern.clone(), tx_pattern.clone()), cfg.proposed_efficiency),
            };
            let rx = DenseArraySide {
                array: rx_array.clone(),
                support: sup_r.clone(),
                patterns: vec![patterns.0],
                efficiency: EfficiencyMatrix::uniform(nr, eta).map_err(SimError::model(&context))?,
            };
            let tx = DenseArraySide {
                array: tx_array.clone(),
                support: sup_s.clone(),
                patterns: vec![patterns.1],
                efficiency: EfficiencyMatrix::uniform(ns, eta).map_err(SimError::model(&context))?,
            };
            // unit-variance entries per element pair, as in an i.i.d. channel
            let model = DenseArrayModel::new(&ctx, &rx, &tx, variances.clone(), cfg.xpr_mean_db, cfg.xpr_std_db)
                .map_err(SimError::model(&context))?
                .with_gain(((nr * ns) as f64).sqrt());
            let caps = map_indexed(realizations, |i| {
                let g = model.compressed(item_seed(scenario, i)).map_err(SimError::model(format!("{context}, realization {i}")))?;
                Allocation::EqualPower
                    .evaluate_streams(&g, power, 1.0, ns)
                    .map(|r| r.capacity)
                    .map_err(SimError::model(format!("{context}, realization {i}")))
            })?;
            let stats = EnsembleStats::from_capacities(caps).map_err(SimError::model(&context))?;
            log::info!("{context}: mean capacity {:.3} bit/s/Hz", stats.mean());
            table.push(vec![
                scheme.as_str().into(),
                spacing.into(),
                nr.into(),
                ns.into(),
                realizations.into(),
                stats.mean().into(),
                stats.std_dev().into(),
                (stats.std_dev() / (realizations as f64).sqrt()).into(),
            ]);
        }
    }
    Ok(vec![TableOutput {
        table,
        description: "ergodic capacity with equal power allocation against receive element spacing",
        plot: Some(Plot {
            x: "rx_spacing",
            y: &["capacity_mean"],
            series: Some("scheme"),
        }),
    }])
}

//! The four scenario commands. Every output carries the config digest.

use crate::config::ScenarioConfig;
use qoptics::hilbert::{
    excess_entropy, partial_trace, state_digest, state_to_json, von_neumann_entropy, Modes, State, Subsystem,
};
use qoptics::homodyne::{balanced_detector_moments, trace_summary, HomodyneDataset, HomodyneSampler, PhaseSchedule};
use qoptics::phase_space::{marginal, quasi_prob_fft, write_grid_csv, GridSidecar, OrderingParam, PhaseGrid};
use qoptics::photon_stats::{bernoulli_loss, fano, g2_zero, mandel_q, photon_distribution, PhotonDistribution};
use qoptics::tomography::{convergence_scan, estimate, exact_expectation, EstimatorKernel, Target};
use qoptics::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::io::BufReader;
use std::path::PathBuf;

const DEFAULT_TARGETS: &[&str] = &["a", "a2", "n", "n2", "x:0", "x2:0"];

fn write_file(cfg: &ScenarioConfig, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    let path = cfg.output_path(name);
    std::fs::write(&path, bytes)?;
    Ok(path)
}

fn write_json<T: Serialize>(cfg: &ScenarioConfig, name: &str, value: &T) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(cfg, name, text.as_bytes())
}

fn comment_line(digest: &str) -> Vec<u8> {
    format!("# config_digest: {digest}\n").into_bytes()
}

/// `None` when the statistic is undefined (for example `g2` of the vacuum).
fn defined(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::UndefinedStatistic(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn distribution_stats(d: &PhotonDistribution) -> Result<Value> {
    Ok(json!({
        "mean": d.mean(),
        "variance": d.variance(),
        "fano": defined(fano(d))?,
        "mandel_q": defined(mandel_q(d))?,
        "g2": defined(g2_zero(d))?,
        "tail_deficit": d.tail_deficit(),
    }))
}

/// Single-mode photon distribution; mode A of a two-mode state.
fn mode_distribution(state: &State) -> Result<PhotonDistribution> {
    match state.modes() {
        Modes::Single => photon_distribution(state),
        Modes::Two => photon_distribution(&State::Mixed(partial_trace(state, Subsystem::A)?)),
    }
}

fn eta(cfg: &ScenarioConfig) -> f64 {
    cfg.eta.unwrap_or(1.0)
}

pub fn state(cfg: &ScenarioConfig) -> Result<Vec<PathBuf>> {
    let digest = cfg.digest();
    let st = cfg.require_state()?.build()?;
    let mut written = vec![write_file(cfg, "state.json", state_to_json(&st, Some(&digest)).as_bytes())?];

    let dist = mode_distribution(&st)?;
    let mut csv = comment_line(&digest);
    dist.write_csv(&mut csv)?;
    written.push(write_file(cfg, "photon_distribution.csv", &csv)?);

    let mut summary = json!({
        "config_digest": digest,
        "state_digest": state_digest(&st),
        "modes": match st.modes() { Modes::Single => 1, Modes::Two => 2 },
        "cutoff": st.cutoff().dim(),
        "tail_deficit": st.tail_deficit(),
        "purity": st.purity(),
        "entropy": von_neumann_entropy(&st),
        "distribution_mode": match st.modes() { Modes::Single => "single", Modes::Two => "A" },
        "photon_statistics": distribution_stats(&dist)?,
    });
    if st.modes() == Modes::Two {
        summary["excess_entropy"] = json!(excess_entropy(&st)?);
    }
    let e = eta(cfg);
    if e < 1.0 {
        let detected = bernoulli_loss(&dist, e)?;
        let mut csv = comment_line(&digest);
        detected.write_csv(&mut csv)?;
        written.push(write_file(cfg, "detected_distribution.csv", &csv)?);
        summary["eta"] = json!(e);
        summary["detected_statistics"] = distribution_stats(&detected)?;
    }
    written.push(write_json(cfg, "summary.json", &summary)?);
    Ok(written)
}

pub fn wigner(cfg: &ScenarioConfig) -> Result<Vec<PathBuf>> {
    let digest = cfg.digest();
    let st = cfg.require_state()?.build()?;
    let spec = cfg.grid.clone().unwrap_or_default();
    let grid = match spec.half_width {
        Some(l) => PhaseGrid::new(l, spec.points)?,
        None => PhaseGrid::for_mean_photons(mode_distribution(&st)?.mean(), spec.points)?,
    };
    let p = OrderingParam::new(spec.ordering).map_err(|e| Error::Config(e.to_string()))?;
    let w = quasi_prob_fft(&st, &grid, p)?;

    let mut csv = comment_line(&digest);
    write_grid_csv(&w, &mut csv)?;
    let mut written = vec![write_file(cfg, "wigner.csv", &csv)?];
    let mut sidecar = GridSidecar::for_grid(&w, &state_digest(&st));
    sidecar.config_digest = Some(digest.clone());
    written.push(write_json(cfg, "wigner.json", &sidecar)?);

    let mut marginals = Vec::new();
    for (k, &theta) in spec.marginal_thetas.iter().enumerate() {
        let pdf = marginal(&w, theta)?;
        let mut csv = comment_line(&digest);
        csv.extend_from_slice(format!("# theta: {theta}\nx,p\n").as_bytes());
        for (x, d) in pdf.xs.iter().zip(&pdf.density) {
            csv.extend_from_slice(format!("{x},{d}\n").as_bytes());
        }
        written.push(write_file(cfg, &format!("marginal_{k}.csv"), &csv)?);
        marginals.push(json!({
            "theta": theta, "mass": pdf.mass(), "mean": pdf.mean(), "variance": pdf.variance(),
        }));
    }
    let summary = json!({
        "config_digest": digest,
        "ordering": spec.ordering,
        "L": grid.half_width(),
        "N": grid.points(),
        "mass": w.mass(),
        "min": w.min(),
        "max": w.max(),
        "imag_residue": w.imag_residue(),
        "marginals": marginals,
    });
    written.push(write_json(cfg, "wigner_summary.json", &summary)?);
    Ok(written)
}

pub fn homodyne(cfg: &ScenarioConfig) -> Result<Vec<PathBuf>> {
    let digest = cfg.digest();
    let st = cfg.require_state()?.build()?;
    let m = cfg.m.ok_or_else(|| Error::Config("the homodyne command needs M (config key 'M' or --M)".into()))?;
    let e = eta(cfg);
    let sampler = HomodyneSampler::new(&st, e)?;
    let ds = sampler.sample(&PhaseSchedule::Uniform { count: m }, cfg.seed)?.with_config_digest(digest.clone());
    let mut written = vec![write_file(cfg, "homodyne.csv", &ds.to_bytes())?];

    let mut summary = json!({ "config_digest": digest, "M": m, "eta": e, "seed": cfg.seed });
    if m >= 2 {
        let ts = trace_summary(&ds, cfg.bins)?;
        let mut csv = comment_line(&digest);
        csv.extend_from_slice(b"theta_lo,theta_hi,count,mean,variance\n");
        for b in &ts.bins {
            csv.extend_from_slice(
                format!("{},{},{},{},{}\n", b.theta_lo, b.theta_hi, b.count, b.mean, b.variance).as_bytes(),
            );
        }
        written.push(write_file(cfg, "trace_bins.csv", &csv)?);
        summary["trace"] = json!({
            "fit": ts.fit,
            "theta_min_variance": ts.theta_min_variance,
            "min_variance": ts.min_variance,
            "max_variance": ts.max_variance,
            "max_squeezing_db": ts.max_squeezing_db,
            "max_antisqueezing_db": ts.max_antisqueezing_db,
        });
    }
    if let Some(z) = cfg.lo_amplitude {
        let rows = [0.0, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2]
            .iter()
            .map(|&theta| {
                let (mean, second) = balanced_detector_moments(&st, z, theta)?;
                Ok(json!({ "theta": theta, "mean": mean, "second_moment": second }))
            })
            .collect::<Result<Vec<_>>>()?;
        summary["detector"] = json!({ "lo_amplitude": z, "moments": rows });
    }
    written.push(write_json(cfg, "trace_summary.json", &summary)?);
    Ok(written)
}

pub fn tomography(cfg: &ScenarioConfig) -> Result<Vec<PathBuf>> {
    let digest = cfg.digest();
    let path = cfg.dataset.as_ref().ok_or_else(|| {
        Error::Config("the tomography command needs a dataset (config key 'dataset' or --dataset)".into())
    })?;
    let bytes = std::fs::read(path).map_err(|e| Error::Data(format!("cannot read dataset {path}: {e}")))?;
    let ds = HomodyneDataset::read(BufReader::new(bytes.as_slice()))?;
    if let Some(e) = cfg.eta {
        if (e - ds.eta()).abs() > 1e-12 {
            return Err(Error::Data(format!("configured eta {e} differs from the dataset header eta {}", ds.eta())));
        }
    }
    let targets: Vec<Target> = if cfg.targets.is_empty() {
        DEFAULT_TARGETS.iter().map(|t| t.parse().expect("default targets parse")).collect()
    } else {
        cfg.parsed_targets()?
    };
    let truth_state = cfg.state.as_ref().map(|s| s.build()).transpose()?;

    let mut rows = Vec::new();
    for target in targets {
        let kernel = EstimatorKernel::new(target, ds.eta())?;
        let est = estimate(&ds, &kernel)?;
        let mut row = serde_json::to_value(&est)?;
        if let Some(st) = &truth_state {
            let truth = exact_expectation(st, target)?;
            row["exact_re"] = json!(truth.re);
            row["exact_im"] = json!(truth.im);
            row["sigmas"] = json!(est.sigmas_from(truth));
        }
        if !cfg.checkpoints.is_empty() {
            if let Some(&last) = cfg.checkpoints.last() {
                if last > ds.len() {
                    return Err(Error::Config(format!("checkpoint {last} exceeds the dataset length {}", ds.len())));
                }
            }
            row["convergence"] = serde_json::to_value(convergence_scan(&ds, &kernel, &cfg.checkpoints)?)?;
        }
        rows.push(row);
    }
    let out = json!({
        "config_digest": digest,
        "dataset_sha256": hex::encode(Sha256::digest(&bytes)),
        "dataset_config_digest": ds.config_digest(),
        "state_digest": ds.state_digest(),
        "M": ds.len(),
        "eta": ds.eta(),
        "estimates": rows,
    });
    Ok(vec![write_json(cfg, "estimates.json", &out)?])
}

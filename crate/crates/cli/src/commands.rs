use std::fs;

use levyito_core::measure::{
    triplet_from_json, triplet_to_json, CharacteristicExponentHandle, LevyTriplet, Region,
};
use levyito_core::recover::{compare_with_truth, recover_triplet, truth_centers};
use levyito_core::rng::RngStream;
use levyito_core::simulate::{Probe, SimConfig, Simulator};
use levyito_core::verify::{CheckReport, CheckStatus};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::checks::{self, Context};
use crate::config::{Loaded, PathOutput, FULL_PATH_LIMIT};
use crate::error::{CliError, CliResult, EXIT_FAIL, EXIT_INCONCLUSIVE};
use crate::output::{csv_bytes, num, sha256_hex, Metadata, OutDir};

fn config_hash(l: &Loaded) -> String {
    let mut c = l.config.clone();
    c.output_dir = None;
    sha256_hex(serde_json::to_string(&c).expect("config serializes").as_bytes())
}

fn load_triplet(l: &Loaded) -> CliResult<Option<(LevyTriplet<f64>, String)>> {
    let Some(p) = &l.config.triplet else {
        return Ok(None);
    };
    let path = l.resolve(p);
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let t: LevyTriplet<f64> = triplet_from_json(&text)?;
    t.ensure_valid()?;
    let hash = sha256_hex(triplet_to_json(&t).as_bytes());
    Ok(Some((t, hash)))
}

fn require_triplet(l: &Loaded) -> CliResult<(LevyTriplet<f64>, String)> {
    load_triplet(l)?.ok_or_else(|| CliError::usage("config has no triplet document"))
}

fn require_simulation(l: &Loaded) -> CliResult<SimConfig<f64>> {
    l.config
        .simulation
        .clone()
        .ok_or_else(|| CliError::usage("config has no simulation section"))
}

fn headers(first: &str, name: &str, dim: usize) -> Vec<String> {
    let mut h = vec![first.to_string(), name.to_string()];
    h.extend((2..=dim).map(|k| format!("{name}{k}")));
    h
}

pub fn simulate(l: &Loaded) -> CliResult<u8> {
    let (triplet, triplet_hash) = require_triplet(l)?;
    let cfg = require_simulation(l)?;
    let sim = Simulator::new(&triplet, &cfg)?;
    let seed = l.config.seed;
    let n = l.config.replicates;
    let dim = triplet.dimension();
    let full = match l.config.path_output {
        PathOutput::Full => true,
        PathOutput::Terminal => false,
        PathOutput::Auto => n <= FULL_PATH_LIMIT,
    };
    let mut out = OutDir::create(&l.output_dir()?)?;
    if full {
        for i in 0..n {
            let p = sim.sample(RngStream::new(seed, i as u64))?;
            let rows = p.grid().iter().enumerate().map(|(k, &t)| {
                let mut r = vec![num(t)];
                r.extend(p.value(k).iter().map(|&v| num(v)));
                r
            });
            out.write(&format!("path_{i}.csv"), &csv_bytes(&headers("t", "value", dim), rows))?;
            let jumps = p.jumps().map(|(t, d)| {
                let mut r = vec![num(t)];
                r.extend(d.iter().map(|&v| num(v)));
                r
            });
            out.write(
                &format!("jumps_{i}.csv"),
                &csv_bytes(&headers("jump_time", "jump_size", dim), jumps),
            )?;
        }
    } else {
        let terminal: Vec<Vec<f64>> = (0..n as u64)
            .into_par_iter()
            .map(|i| Ok(sim.sample(RngStream::new(seed, i))?.terminal().to_vec()))
            .collect::<CliResult<_>>()?;
        let rows = terminal.iter().enumerate().map(|(i, v)| {
            let mut r = vec![i.to_string()];
            r.extend(v.iter().map(|&x| num(x)));
            r
        });
        out.write("terminal.csv", &csv_bytes(&headers("replicate", "value", dim), rows))?;
    }
    let mut meta = Metadata::new("simulate", seed, n, config_hash(l));
    meta.triplet_sha256 = Some(triplet_hash);
    meta.details.insert("epsilon".into(), json!(cfg.epsilon));
    meta.details.insert("compensator_rate".into(), json!(sim.compensator_rate()));
    meta.details
        .insert("omitted_variance_bound".into(), json!(sim.omitted_variance_bound()));
    meta.details
        .insert("mode".into(), json!(if full { "full" } else { "terminal" }));
    out.finish(meta)?;
    println!(
        "simulated {n} replicate(s), seed {seed}, omitted-variance bound {:e}",
        sim.omitted_variance_bound()
    );
    Ok(0)
}

fn exit_code(reports: &[CheckReport]) -> u8 {
    if reports.iter().any(|r| r.status == CheckStatus::Fail) {
        EXIT_FAIL
    } else if reports.iter().any(|r| r.status == CheckStatus::Inconclusive) {
        EXIT_INCONCLUSIVE
    } else {
        0
    }
}

pub fn verify(l: &Loaded) -> CliResult<u8> {
    let (triplet, triplet_hash) = require_triplet(l)?;
    let mut cfg = require_simulation(l)?;
    let params = &l.config.check_params;
    let names = if l.config.checks.is_empty() {
        checks::default_battery()
    } else {
        l.config.checks.clone()
    };
    if names.iter().any(|n| n == "strong_markov") {
        // the restart time T + s must be observed
        match &mut cfg.probe {
            None => {
                let region: Region<f64> = params
                    .region
                    .parse()
                    .map_err(|e| CliError::data(format!("check region: {e}")))?;
                cfg.probe = Some(Probe {
                    region,
                    lags: vec![params.lag],
                });
            }
            Some(p) if !p.lags.contains(&params.lag) => p.lags.push(params.lag),
            Some(_) => {}
        }
    }
    let seed = l.config.seed;
    let n = l.config.replicates;
    let paths = Simulator::new(&triplet, &cfg)?.sample_batch(seed, n)?;
    let ctx = Context {
        triplet: &triplet,
        paths: &paths,
        seed,
        params,
        time: params.time.unwrap_or(cfg.horizon),
    };
    let mut reports = Vec::with_capacity(names.len());
    for name in &names {
        let r = checks::run(name, &ctx)?;
        println!("{r}");
        reports.push(r);
    }
    let mut out = OutDir::create(&l.output_dir()?)?;
    let mut text = CheckReport::to_json_array(&reports);
    text.push('\n');
    out.write("report.json", text.as_bytes())?;
    let mut meta = Metadata::new("verify", seed, n, config_hash(l));
    meta.triplet_sha256 = Some(triplet_hash);
    meta.details.insert("checks".into(), json!(names));
    out.finish(meta)?;
    Ok(exit_code(&reports))
}

fn read_psi_table(l: &Loaded) -> CliResult<Option<(CharacteristicExponentHandle<f64>, String)>> {
    let Some(p) = &l.config.psi_table else {
        return Ok(None);
    };
    let path = l.resolve(p);
    let bytes = fs::read(&path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let bad = |msg: String| CliError::data(format!("psi table {}: {msg}", path.display()));
    let mut r = csv::Reader::from_reader(bytes.as_slice());
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["u", "re", "im"] {
        return Err(bad("header must be u,re,im".into()));
    }
    let (mut grid, mut values) = (Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |k: usize| -> CliResult<f64> {
            rec[k]
                .trim()
                .parse()
                .map_err(|_| bad(format!("not a number: '{}'", &rec[k])))
        };
        grid.push(field(0)?);
        values.push(Complex64::new(field(1)?, field(2)?));
    }
    let handle = CharacteristicExponentHandle::tabulated(grid, values)?;
    Ok(Some((handle, sha256_hex(&bytes))))
}

fn table_rows(r: &CheckReport) -> impl Iterator<Item = Vec<String>> + '_ {
    r.components.iter().map(|c| {
        vec![
            c.name.clone(),
            num(c.statistic),
            num(c.expected),
            num(c.tolerance),
            c.pass.to_string(),
        ]
    })
}

pub fn recover(l: &Loaded) -> CliResult<u8> {
    let truth = load_triplet(l)?;
    if let Some((t, _)) = &truth {
        if t.dimension() != 1 {
            return Err(CliError::usage(format!(
                "recovery is one-dimensional; the triplet has dimension {}",
                t.dimension()
            )));
        }
    }
    let table = read_psi_table(l)?;
    let psi = match (&table, &truth) {
        (Some((h, _)), _) => h.clone(),
        (None, Some((t, _))) => CharacteristicExponentHandle::analytic(t)?,
        (None, None) => return Err(CliError::usage("recover needs a triplet or a psi_table")),
    };
    psi.check_origin()?;
    let centers = truth.as_ref().map(|(t, _)| truth_centers(t));
    let rec = recover_triplet(&psi, &l.config.recovery, centers.as_deref())?;

    let mut out = OutDir::create(&l.output_dir()?)?;
    let mut doc = triplet_to_json(&rec.to_triplet());
    doc.push('\n');
    out.write("recovered_triplet.json", doc.as_bytes())?;
    let m = &rec.measure;
    let rows = (0..m.x.len()).map(|k| vec![num(m.x[k]), num(m.rho[k]), num(m.nu[k])]);
    out.write(
        "measure.csv",
        &csv_bytes(&["x".into(), "rho".into(), "nu".into()], rows),
    )?;
    let diagnostics = json!({
        "diffusion": rec.diffusion,
        "drift": rec.drift,
        "atoms": m.atoms,
        "negative_mass_fraction": m.negative_mass_fraction,
        "inconsistent_input": m.inconsistent_input,
        "floor_active": m.floor_active,
    });
    let mut text = serde_json::to_string_pretty(&diagnostics).expect("diagnostics serialize");
    text.push('\n');
    out.write("recovery.json", text.as_bytes())?;

    println!(
        "σ² = {} (error {:e}), â = {} (cross-check {}), {} atom(s)",
        rec.diffusion.sigma2,
        rec.diffusion.error,
        rec.drift.drift,
        rec.drift.cross_check,
        m.atoms.len()
    );
    for (flag, msg) in [
        (rec.diffusion.not_converging, "σ² sequence not converging"),
        (rec.drift.flagged, "drift cross-check gap exceeds its error estimate"),
        (m.inconsistent_input, "inconsistent input: negative ρ̂ mass above 5%"),
        (m.floor_active, "denominator floor active near the origin"),
    ] {
        if flag {
            println!("flag: {msg}");
        }
    }

    let mut code = 0;
    if let Some((t, _)) = &truth {
        let report = compare_with_truth(&rec, t)?;
        let header = ["component", "statistic", "expected", "tolerance", "pass"].map(String::from);
        out.write("roundtrip.csv", &csv_bytes(&header, table_rows(&report)))?;
        for c in &report.components {
            println!(
                "{} {}: {} vs {} (tolerance {})",
                if c.pass { "ok  " } else { "FAIL" },
                c.name,
                c.statistic,
                c.expected,
                c.tolerance
            );
        }
        println!("{report}");
        if !report.pass {
            code = EXIT_FAIL;
        }
    }
    let mut meta = Metadata::new("recover", l.config.seed, 1, config_hash(l));
    meta.triplet_sha256 = truth.map(|(_, h)| h);
    meta.psi_table_sha256 = table.map(|(_, h)| h);
    meta.details.insert("deterministic".into(), Value::Bool(true));
    out.finish(meta)?;
    Ok(code)
}

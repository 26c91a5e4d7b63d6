use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use twomode::io::{self, SweepJson, SweepProvenance};
use twomode::targets::{self, TargetKind, TargetSpec, Truncated};
use twomode::{
    check_feasibility, de_evolve, op_count_expected, preparation_sequence, Complex64, Direction,
    Error, FeasibilityParams, NoiseInterval, RabiRegime,
};

use crate::provenance::Provenance;
use crate::{exit, CheckArgs, Format, Interval, Kind, Regime, SimulateArgs, SynthesizeArgs, TargetArgs, TargetsArgs};

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Malformed { .. }
        | Error::Io { .. }
        | Error::Json(_)
        | Error::Csv(_)
        | Error::InvalidArgument(_)
        | Error::InvalidRegime(_)
        | Error::UnknownChannel(_)
        | Error::IndexOutOfRange { .. }
        | Error::OffsetOutOfRange { .. }
        | Error::CoefficientCount { .. }
        | Error::NotNormalized { .. } => exit::INPUT,
        _ => exit::COMPUTE,
    }
}

fn fail(context: &str, e: &Error) -> u8 {
    eprintln!("error: {context}: {e}");
    exit_code(e)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".provenance.json");
    path.with_file_name(name)
}

fn finish(mut prov: Provenance, start: Instant) -> Provenance {
    prov.wall_time_s = start.elapsed().as_secs_f64();
    prov
}

#[derive(Serialize)]
struct TargetInfo {
    kind: Kind,
    m_max: usize,
    n_max: usize,
    nonzero: usize,
    mean_quanta: f64,
    /// Probability removed by truncation before renormalization.
    tail_mass: f64,
    /// Norm divided out when loading a custom file.
    rescale: f64,
}

fn analytic_spec(kind: Kind, alpha: f64, alpha_im: f64, mmax: usize, nmax: Option<usize>) -> Result<TargetSpec, Error> {
    let kind = match kind {
        Kind::Cat => TargetKind::Cat,
        Kind::Correlated => TargetKind::Correlated,
        Kind::Custom => {
            return Err(Error::InvalidArgument("custom targets are read with --file".into()))
        }
    };
    Ok(TargetSpec {
        kind,
        alpha: Complex64::new(alpha, alpha_im),
        m_max: mmax,
        n_max: nmax.unwrap_or(mmax),
        source: None,
    })
}

fn build_target(args: &TargetArgs, prov: &mut Provenance) -> Result<(Truncated, f64), Error> {
    match args.kind {
        Kind::Custom => {
            let path = args
                .file
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("--target custom needs --file".into()))?;
            let loaded = io::load_target(path)?;
            prov.add_input(path, io::sha256_file(path)?);
            if loaded.rescale != 1.0 {
                eprintln!("note: {} rescaled by 1/{}", path.display(), loaded.rescale);
            }
            Ok((
                Truncated {
                    state: loaded.state,
                    tail_mass: 0.0,
                },
                loaded.rescale,
            ))
        }
        kind => {
            let spec = analytic_spec(kind, args.alpha, args.alpha_im, args.mmax, args.nmax)?;
            Ok((targets::build(&spec)?, 1.0))
        }
    }
}

#[derive(Serialize)]
struct SynthesisReport {
    target: TargetInfo,
    regime: RabiRegime,
    j_max: usize,
    residual_vacuum_infidelity: f64,
    global_phase: f64,
    emitted: usize,
    skipped: usize,
    slots: usize,
    expected_slots: usize,
    files: Vec<String>,
    provenance: Provenance,
}

pub fn synthesize(out_dir: &Path, args: &SynthesizeArgs, config: serde_json::Value) -> u8 {
    let start = Instant::now();
    let mut prov = Provenance::new(config);
    let (target, rescale) = match build_target(&args.target, &mut prov) {
        Ok(t) => t,
        Err(e) => return fail("cannot build target", &e),
    };
    let regime = match args.regime {
        Regime::LambDicke => RabiRegime::LambDicke,
        Regime::Nonlinear => RabiRegime::Nonlinear {
            eps_x: args.eps_x,
            eps_y: args.eps_y,
        },
    };
    if let Err(e) = regime.validate() {
        return fail("bad regime", &e);
    }
    let result = match de_evolve(&target.state, regime) {
        Ok(r) => r,
        Err(e) => return fail("synthesis failed", &e),
    };
    let prepare = preparation_sequence(&result);

    let dir = args.out.clone().unwrap_or_else(|| out_dir.to_path_buf());
    let paths = [
        dir.join("target.json"),
        dir.join("deevolve.json"),
        dir.join("prepare.json"),
    ];
    let written = ensure_dir(&dir)
        .and_then(|_| io::save_target(&target.state, &paths[0]))
        .and_then(|_| io::save_sequence(&result.sequence, &paths[1]))
        .and_then(|_| io::save_sequence(&prepare, &paths[2]));
    if let Err(e) = written {
        return fail("cannot write output", &e);
    }

    let seq = &result.sequence;
    let report = SynthesisReport {
        target: TargetInfo {
            kind: args.target.kind,
            m_max: target.state.m_max(),
            n_max: target.state.n_max(),
            nonzero: target.state.nonzero_count(),
            mean_quanta: target.state.mean_quanta(),
            tail_mass: target.tail_mass,
            rescale,
        },
        regime,
        j_max: seq.j_max,
        residual_vacuum_infidelity: result.residual_vacuum_infidelity,
        global_phase: result.global_phase,
        emitted: seq.pulses.len(),
        skipped: seq.skipped,
        slots: seq.slots(),
        expected_slots: op_count_expected(seq.j_max),
        files: paths.iter().map(|p| p.display().to_string()).collect(),
        provenance: finish(prov, start),
    };
    if let Err(e) = write_json(&dir.join("report.json"), &report) {
        return fail("cannot write report", &e);
    }
    println!(
        "j_max={} emitted={} skipped={} slots={} residual={:e} -> {}",
        report.j_max,
        report.emitted,
        report.skipped,
        report.slots,
        report.residual_vacuum_infidelity,
        dir.display()
    );
    exit::OK
}

pub fn simulate(out_dir: &Path, args: &SimulateArgs, config: serde_json::Value) -> u8 {
    let start = Instant::now();
    let mut prov = Provenance::new(config);
    let seq = match io::load_sequence(&args.sequence) {
        Ok(s) => s,
        Err(e) => return fail("cannot read sequence", &e),
    };
    if seq.direction != Direction::Prepare {
        eprintln!(
            "error: {} is a {} sequence; simulate needs a prepare sequence",
            args.sequence.display(),
            seq.direction.as_str()
        );
        return exit::COMPUTE;
    }
    let target = match io::load_target(&args.target) {
        Ok(t) => t.state,
        Err(e) => return fail("cannot read target", &e),
    };
    let (seq_hash, target_hash) = match (io::sha256_file(&args.sequence), io::sha256_file(&args.target)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return fail("cannot hash inputs", &e),
    };
    prov.add_input(&args.sequence, seq_hash.clone());
    prov.add_input(&args.target, target_hash.clone());

    let deltas: Vec<f64> = match args.delta {
        Some(d) => vec![d],
        None => args.deltas.clone(),
    };
    if deltas.is_empty() {
        eprintln!("error: give --delta or --deltas");
        return exit::INPUT;
    }
    if let Some(bad) = deltas.iter().find(|d| !d.is_finite() || **d < 0.0) {
        eprintln!("error: noise range must be finite and nonnegative, got {bad}");
        return exit::INPUT;
    }
    if args.runs == 0 {
        eprintln!("error: --runs must be at least 1");
        return exit::INPUT;
    }
    let interval = match args.interval {
        Interval::Centered => NoiseInterval::Centered,
        Interval::Wide => NoiseInterval::Wide,
        Interval::OneSided => NoiseInterval::OneSided,
    };
    let reports = match twomode::noise::sweep_with(&seq, &target, &deltas, args.runs, args.seed, interval) {
        Ok(r) => r,
        Err(e) => return fail("simulation failed", &e),
    };

    let out = args.out.clone().unwrap_or_else(|| {
        out_dir.join(match args.format {
            Format::Csv => "sweep.csv",
            Format::Json => "sweep.json",
        })
    });
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        if let Err(e) = ensure_dir(parent) {
            return fail("cannot create output directory", &e);
        }
    }
    let written = match args.format {
        Format::Csv => io::sweep_csv(&reports).and_then(|text| {
            fs::write(&out, text).map_err(|source| Error::Io {
                path: out.clone(),
                source,
            })
        }),
        Format::Json => write_json(
            &out,
            &SweepJson {
                reports: reports.clone(),
                provenance: SweepProvenance {
                    sequence_sha256: seq_hash,
                    target_sha256: target_hash,
                },
            },
        ),
    };
    if let Err(e) = written.and_then(|_| write_json(&sidecar(&out), &finish(prov, start))) {
        return fail("cannot write output", &e);
    }
    for r in &reports {
        println!(
            "delta={} mean_fidelity={:.6} std_error={:.2e} runs={} seed={}",
            r.delta, r.mean_fidelity, r.std_error, r.runs, r.seed
        );
    }
    exit::OK
}

#[derive(Serialize)]
struct CheckOutput {
    params: FeasibilityParams,
    report: twomode::FeasibilityReport,
    provenance: Provenance,
}

pub fn check(args: &CheckArgs, config: serde_json::Value) -> u8 {
    let start = Instant::now();
    let positive = [
        ("--g", args.g),
        ("--nu-x", args.nu_x),
        ("--nu-y", args.nu_y),
        ("--margin", args.margin),
    ];
    if let Some((name, v)) = positive.iter().find(|(_, v)| v.is_nan() || *v <= 0.0) {
        eprintln!("error: {name} must be positive, got {v}");
        return exit::INPUT;
    }
    let params = FeasibilityParams {
        g_mag: args.g,
        eps_x: args.eps_x,
        eps_y: args.eps_y,
        nu_x: args.nu_x,
        nu_y: args.nu_y,
        m_max: args.mmax,
        n_max: args.nmax,
        margin: args.margin,
    };
    let report = check_feasibility(&params);
    let out = CheckOutput {
        params,
        report,
        provenance: finish(Provenance::new(config), start),
    };
    match serde_json::to_string_pretty(&out) {
        Ok(text) => println!("{text}"),
        Err(e) => return fail("cannot format report", &e.into()),
    }
    if !report.coupling_pass {
        eprintln!(
            "infeasible: coupling ratio {:.6e} exceeds margin {}",
            report.coupling_ratio, report.margin
        );
    }
    if !report.anisotropy_pass {
        eprintln!(
            "infeasible: trap anisotropy {:.6} below {}",
            report.anisotropy, report.min_anisotropy
        );
    }
    if report.pass {
        exit::OK
    } else {
        exit::INFEASIBLE
    }
}

pub fn targets(out_dir: &Path, args: &TargetsArgs, config: serde_json::Value) -> u8 {
    let start = Instant::now();
    let spec = match analytic_spec(args.kind, args.alpha, args.alpha_im, args.mmax, args.nmax) {
        Ok(s) => s,
        Err(e) => return fail("bad target", &e),
    };
    let built = match targets::build(&spec) {
        Ok(t) => t,
        Err(e) => return fail("cannot build target", &e),
    };
    let out = args.out.clone().unwrap_or_else(|| out_dir.join("target.json"));
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        if let Err(e) = ensure_dir(parent) {
            return fail("cannot create output directory", &e);
        }
    }
    let written = io::save_target(&built.state, &out)
        .and_then(|_| write_json(&sidecar(&out), &finish(Provenance::new(config), start)));
    if let Err(e) = written {
        return fail("cannot write target", &e);
    }
    println!(
        "m_max={} n_max={} nonzero={} mean_quanta={:.6} tail_mass={:e} -> {}",
        built.state.m_max(),
        built.state.n_max(),
        built.state.nonzero_count(),
        built.state.mean_quanta(),
        built.tail_mass,
        out.display()
    );
    exit::OK
}

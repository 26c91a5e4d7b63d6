//! JSON and CSV file formats.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channels::{reduce_angle, Channel, Pulse, RabiRegime};
use crate::error::{Error, Result};
use crate::fock::{BasisIndex, TargetState, NORM_TOL};
use crate::noise::FidelityReport;
use crate::synth::{Direction, PulseSequence};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientEntry {
    pub m: usize,
    pub n: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetFile {
    pub m_max: usize,
    pub n_max: usize,
    pub coefficients: Vec<CoefficientEntry>,
}

impl From<&TargetState> for TargetFile {
    fn from(t: &TargetState) -> Self {
        TargetFile {
            m_max: t.m_max(),
            n_max: t.n_max(),
            coefficients: t
                .iter()
                .filter(|(_, _, q)| q.norm_sqr() > 0.0)
                .map(|(m, n, q)| CoefficientEntry {
                    m,
                    n,
                    re: q.re,
                    im: q.im,
                })
                .collect(),
        }
    }
}

/// A target read from disk. `rescale` is the norm that was divided out
/// (1 when the file was already normalized).
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedTarget {
    pub state: TargetState,
    pub rescale: f64,
}

fn malformed(path: &Path, reason: impl Into<String>) -> Error {
    Error::Malformed {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn target_from_file(file: &TargetFile, path: &Path) -> Result<LoadedTarget> {
    let w = file.n_max + 1;
    let mut coefficients = vec![C64::new(0.0, 0.0); (file.m_max + 1) * w];
    let mut seen = vec![false; coefficients.len()];
    for (k, e) in file.coefficients.iter().enumerate() {
        if e.m > file.m_max || e.n > file.n_max {
            return Err(malformed(
                path,
                format!(
                    "coefficient #{k} (m={}, n={}) lies outside m_max={}, n_max={}",
                    e.m, e.n, file.m_max, file.n_max
                ),
            ));
        }
        if !e.re.is_finite() || !e.im.is_finite() {
            return Err(malformed(path, format!("coefficient #{k} (m={}, n={}) is not finite", e.m, e.n)));
        }
        let slot = e.m * w + e.n;
        if seen[slot] {
            return Err(malformed(path, format!("coefficient #{k} repeats (m={}, n={})", e.m, e.n)));
        }
        seen[slot] = true;
        coefficients[slot] = C64::new(e.re, e.im);
    }
    let (state, rescale) = TargetState::normalized(file.m_max, file.n_max, coefficients)
        .map_err(|e| match e {
            Error::ZeroNorm => malformed(path, "coefficients have zero norm"),
            other => other,
        })?;
    Ok(LoadedTarget { state, rescale })
}

pub fn load_target(path: &Path) -> Result<LoadedTarget> {
    let bytes = read(path)?;
    let file: TargetFile =
        serde_json::from_slice(&bytes).map_err(|e| malformed(path, e.to_string()))?;
    target_from_file(&file, path)
}

pub fn target_to_json(t: &TargetState) -> Result<String> {
    Ok(serde_json::to_string_pretty(&TargetFile::from(t))? + "\n")
}

pub fn save_target(t: &TargetState, path: &Path) -> Result<()> {
    write_bytes(path, target_to_json(t)?.as_bytes())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseRecord {
    pub seq: usize,
    pub channel: Channel,
    pub cancel: BasisIndex,
    pub theta: f64,
    pub base_angle: f64,
    /// Present only when it differs from the sequence regime.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<RabiRegime>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceFile {
    pub direction: Direction,
    pub j_max: usize,
    pub regime: RabiRegime,
    #[serde(default)]
    pub skipped: usize,
    pub pulses: Vec<PulseRecord>,
}

impl From<&PulseSequence> for SequenceFile {
    fn from(seq: &PulseSequence) -> Self {
        SequenceFile {
            direction: seq.direction,
            j_max: seq.j_max,
            regime: seq.regime,
            skipped: seq.skipped,
            pulses: seq
                .pulses
                .iter()
                .enumerate()
                .map(|(k, p)| PulseRecord {
                    seq: k,
                    channel: p.channel,
                    cancel: p.cancel,
                    theta: p.theta,
                    base_angle: p.base_angle,
                    regime: (p.regime != seq.regime).then_some(p.regime),
                })
                .collect(),
        }
    }
}

pub fn sequence_from_file(file: &SequenceFile, path: &Path) -> Result<PulseSequence> {
    file.regime.validate().map_err(|e| malformed(path, e.to_string()))?;
    let mut pulses = Vec::with_capacity(file.pulses.len());
    for (k, r) in file.pulses.iter().enumerate() {
        if r.seq != k {
            return Err(malformed(path, format!("pulse #{k} has seq {}", r.seq)));
        }
        if r.cancel.quanta() > file.j_max {
            return Err(malformed(
                path,
                format!("pulse #{k} cancels {} outside j_max={}", r.cancel, file.j_max),
            ));
        }
        if !r.theta.is_finite() || !r.base_angle.is_finite() || r.base_angle < 0.0 {
            return Err(malformed(path, format!("pulse #{k} has invalid angles")));
        }
        let regime = r.regime.unwrap_or(file.regime);
        regime.validate().map_err(|e| malformed(path, format!("pulse #{k}: {e}")))?;
        pulses.push(Pulse {
            channel: r.channel,
            cancel: r.cancel,
            theta: reduce_angle(r.theta),
            base_angle: r.base_angle,
            regime,
        });
    }
    Ok(PulseSequence {
        direction: file.direction,
        j_max: file.j_max,
        regime: file.regime,
        pulses,
        skipped: file.skipped,
    })
}

pub fn sequence_to_json(seq: &PulseSequence) -> Result<String> {
    Ok(serde_json::to_string_pretty(&SequenceFile::from(seq))? + "\n")
}

pub fn save_sequence(seq: &PulseSequence, path: &Path) -> Result<()> {
    write_bytes(path, sequence_to_json(seq)?.as_bytes())
}

pub fn load_sequence(path: &Path) -> Result<PulseSequence> {
    let bytes = read(path)?;
    let file: SequenceFile =
        serde_json::from_slice(&bytes).map_err(|e| malformed(path, e.to_string()))?;
    sequence_from_file(&file, path)
}

/// Float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const SWEEP_CSV_HEADER: [&str; 5] = ["delta", "mean_fidelity", "std_error", "runs", "seed"];

pub fn write_sweep_csv<W: Write>(out: W, reports: &[FidelityReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_CSV_HEADER)?;
    for r in reports {
        w.write_record([
            fmt_f64(r.delta),
            fmt_f64(r.mean_fidelity),
            fmt_f64(r.std_error),
            r.runs.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush().map_err(|source| Error::Io {
        path: PathBuf::from("<csv>"),
        source,
    })?;
    Ok(())
}

pub fn sweep_csv(reports: &[FidelityReport]) -> Result<String> {
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, reports)?;
    Ok(String::from_utf8(buf).expect("csv output is ascii"))
}

/// Input provenance for sweep JSON output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepProvenance {
    pub sequence_sha256: String,
    pub target_sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepJson {
    pub reports: Vec<FidelityReport>,
    pub provenance: SweepProvenance,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(sha256_hex(&read(path)?))
}

/// Whether a coefficient table already has unit norm.
pub fn is_normalized(t: &TargetState) -> bool {
    (t.norm() - 1.0).abs() <= NORM_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::RabiRegime;
    use crate::synth::{de_evolve, preparation_sequence};
    use crate::targets::cat_state;

    #[test]
    fn target_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cat.json");
        let t = cat_state(C64::new(2.0, 0.0), 6, 6).unwrap();
        save_target(&t, &path).unwrap();
        let loaded = load_target(&path).unwrap();
        assert_eq!(loaded.rescale, 1.0);
        for ((_, _, a), (_, _, b)) in t.iter().zip(loaded.state.iter()) {
            assert!((a - b).norm() <= 1e-15);
        }
    }

    #[test]
    fn unnormalized_file_is_rescaled() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        fs::write(
            &path,
            r#"{"m_max":1,"n_max":0,"coefficients":[{"m":0,"n":0,"re":2.0,"im":0.0}]}"#,
        )
        .unwrap();
        let loaded = load_target(&path).unwrap();
        assert_eq!(loaded.rescale, 2.0);
        assert_eq!(loaded.state.get(0, 0), C64::new(1.0, 0.0));
        assert!(is_normalized(&loaded.state));
    }

    #[test]
    fn out_of_range_entry_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(
            &path,
            r#"{"m_max":1,"n_max":1,"coefficients":[{"m":0,"n":0,"re":1.0,"im":0.0},{"m":3,"n":0,"re":1.0,"im":0.0}]}"#,
        )
        .unwrap();
        let err = load_target(&path).unwrap_err().to_string();
        assert!(err.contains("#1") && err.contains("m=3"), "{err}");
    }

    #[test]
    fn malformed_json_and_zero_norm() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(&path, "{ not json").unwrap();
        assert!(matches!(load_target(&path), Err(Error::Malformed { .. })));
        fs::write(&path, r#"{"m_max":0,"n_max":0,"coefficients":[]}"#).unwrap();
        assert!(matches!(load_target(&path), Err(Error::Malformed { .. })));
        assert!(matches!(
            load_target(&dir.path().join("missing.json")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn sequence_round_trip_is_exact() {
        let t = cat_state(C64::new(1.0, 0.5), 2, 2).unwrap();
        let r = de_evolve(&t, RabiRegime::LambDicke).unwrap();
        let prep = preparation_sequence(&r);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("prep.json");
        save_sequence(&prep, &path).unwrap();
        assert_eq!(load_sequence(&path).unwrap(), prep);

        let text = sequence_to_json(&prep).unwrap();
        assert!(text.contains("\"direction\": \"prepare\""));
        assert!(text.contains("\"level\": \"a\""));
    }

    #[test]
    fn mixed_regime_round_trip() {
        let regime = RabiRegime::Nonlinear {
            eps_x: 0.2,
            eps_y: 0.1,
        };
        let t = cat_state(C64::new(1.0, 0.0), 2, 2).unwrap();
        let r = de_evolve(&t, regime).unwrap();
        let text = sequence_to_json(&r.sequence).unwrap();
        assert!(text.contains("\"kind\": \"lamb_dicke\""));
        let file: SequenceFile = serde_json::from_str(&text).unwrap();
        assert_eq!(sequence_from_file(&file, Path::new("x")).unwrap(), r.sequence);
    }

    #[test]
    fn bad_sequence_files() {
        let bad_channel = r#"{"direction":"prepare","j_max":1,"regime":{"kind":"lamb_dicke"},
            "pulses":[{"seq":0,"channel":7,"cancel":{"m":0,"n":0,"level":"a"},"theta":0.0,"base_angle":1.0}]}"#;
        assert!(serde_json::from_str::<SequenceFile>(bad_channel).is_err());

        let outside = r#"{"direction":"prepare","j_max":1,"regime":{"kind":"lamb_dicke"},
            "pulses":[{"seq":0,"channel":1,"cancel":{"m":2,"n":0,"level":"a"},"theta":0.0,"base_angle":1.0}]}"#;
        let file: SequenceFile = serde_json::from_str(outside).unwrap();
        assert!(sequence_from_file(&file, Path::new("x")).is_err());
    }

    #[test]
    fn csv_layout() {
        let r = FidelityReport {
            delta: 0.001,
            mean_fidelity: 0.5,
            std_error: 0.0,
            runs: 100,
            seed: 7,
            rng: String::new(),
            interval: Default::default(),
        };
        let csv = sweep_csv(&[r]).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("delta,mean_fidelity,std_error,runs,seed"));
        assert_eq!(
            lines.next(),
            Some("1.0000000000000000e-3,5.0000000000000000e-1,0.0000000000000000e0,100,7")
        );
    }
}

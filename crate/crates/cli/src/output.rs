use anyhow::{Context, Result};
use ghz_core::{squared_area, PulseSchedule, ScheduleMetadata, ScheduleSample};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Sidecar written next to a schedule CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSidecar {
    /// `normalized` or `physical`
    pub units: String,
    pub omega_ref_mhz: Option<f64>,
    /// Squared pulse area in file units.
    pub area: f64,
    /// Rabi frequencies at mid-pulse, in file units.
    pub plateau: [f64; 3],
    /// Endpoint and profile, in normalized units.
    pub metadata: Option<ScheduleMetadata>,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

/// Normalized to physical units: `t / w`, `Omega * w`.
pub fn to_physical(s: &PulseSchedule, w: f64) -> Result<PulseSchedule> {
    rescale(s, 1.0 / w, w)
}

pub fn from_physical(s: &PulseSchedule, w: f64) -> Result<PulseSchedule> {
    rescale(s, w, 1.0 / w)
}

fn rescale(s: &PulseSchedule, time: f64, rate: f64) -> Result<PulseSchedule> {
    let samples = s
        .samples
        .iter()
        .map(|x| ScheduleSample {
            t: x.t * time,
            omega1: x.omega1 * rate,
            omega2: x.omega2 * rate,
            omega3: x.omega3 * rate,
        })
        .collect();
    let mut out = PulseSchedule::new(samples)?;
    out.metadata = s.metadata.clone();
    Ok(out)
}

pub fn plateau(s: &PulseSchedule) -> [f64; 3] {
    s.rabi_at(s.start() + 0.5 * s.duration()).as_array()
}

/// Writes the schedule (in normalized units) as CSV plus sidecar, converting
/// to physical units when `omega_ref` is given.
pub fn write_schedule(
    s: &PulseSchedule,
    path: &Path,
    omega_ref: Option<f64>,
) -> Result<ScheduleSidecar> {
    let file_schedule = match omega_ref {
        Some(w) => to_physical(s, w)?,
        None => s.clone(),
    };
    let sidecar = ScheduleSidecar {
        units: if omega_ref.is_some() {
            "physical"
        } else {
            "normalized"
        }
        .into(),
        omega_ref_mhz: omega_ref,
        area: squared_area(&file_schedule),
        plateau: plateau(&file_schedule),
        metadata: s.metadata.clone(),
    };
    let f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    file_schedule.write_csv(std::io::BufWriter::new(f))?;
    write_json(&sidecar, Some(&sidecar_path(path)))?;
    Ok(sidecar)
}

/// Reads a schedule CSV and returns it in normalized units. The sidecar's
/// units take precedence over `omega_ref`.
pub fn read_schedule(path: &Path, omega_ref: Option<f64>) -> Result<(PulseSchedule, Option<f64>)> {
    let f = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let raw = PulseSchedule::read_csv(std::io::BufReader::new(f))
        .with_context(|| format!("reading {}", path.display()))?;
    let sidecar: Option<ScheduleSidecar> = match std::fs::read_to_string(sidecar_path(path)) {
        Ok(text) => Some(serde_json::from_str(&text).with_context(|| "parsing schedule sidecar")?),
        Err(_) => None,
    };
    let w = match &sidecar {
        Some(sc) if sc.units == "physical" => sc.omega_ref_mhz,
        Some(_) => None,
        None => omega_ref,
    };
    let mut s = match w {
        Some(w) => from_physical(&raw, w)?,
        None => raw,
    };
    s.metadata = sidecar.and_then(|sc| sc.metadata);
    Ok((s, w))
}

/// Pretty JSON to `path`, or stdout when `None`.
pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Appends a timestamped line to the sidecar log, if one applies.
pub fn log(explicit: Option<&Path>, primary: Option<&Path>, message: &str) {
    let path = match (explicit, primary) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) => {
            let mut name = p.as_os_str().to_owned();
            name.push(".log");
            PathBuf::from(name)
        }
        (None, None) => return,
    };
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);
    if let Ok(mut f) = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
    {
        let _ = writeln!(f, "[{secs:.3}] {message}");
    }
}

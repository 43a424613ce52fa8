//! Sampled Rabi-frequency schedules and their CSV form.
//!
//! The CSV header is `t,omega1,omega2,omega3`; consumers interpolate
//! linearly between rows.

use crate::dynamics::RabiTriple;
use crate::error::{Error, Result};
use crate::synthesis::{EndpointSolution, PulseProfile};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSample {
    pub t: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
}

impl ScheduleSample {
    pub fn new(t: f64, rabi: RabiTriple) -> Self {
        Self {
            t,
            omega1: rabi.omega1,
            omega2: rabi.omega2,
            omega3: rabi.omega3,
        }
    }

    pub fn rabi(&self) -> RabiTriple {
        RabiTriple::new(self.omega1, self.omega2, self.omega3)
    }
}

/// Where a schedule came from. Not part of the CSV payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleMetadata {
    pub endpoint: EndpointSolution,
    pub profile: PulseProfile,
    pub area: f64,
    #[serde(default)]
    pub reversed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    pub samples: Vec<ScheduleSample>,
    pub metadata: Option<ScheduleMetadata>,
}

impl PulseSchedule {
    /// Validates that the schedule is non-empty, finite, and strictly
    /// increasing in time.
    pub fn new(samples: Vec<ScheduleSample>) -> Result<Self> {
        let s = Self {
            samples,
            metadata: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_metadata(mut self, metadata: ScheduleMetadata) -> Self {
        self.metadata = Some(metadata);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::InvalidParameter("empty schedule".into()));
        }
        for (row, s) in self.samples.iter().enumerate() {
            let finite = [s.t, s.omega1, s.omega2, s.omega3]
                .iter()
                .all(|x| x.is_finite());
            let increasing = row == 0 || s.t > self.samples[row - 1].t;
            if !finite || !increasing {
                return Err(Error::NonFiniteSchedule { row });
            }
        }
        Ok(())
    }

    pub fn start(&self) -> f64 {
        self.samples[0].t
    }

    pub fn end(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    pub fn duration(&self) -> f64 {
        self.end() - self.start()
    }

    /// Linear interpolation, clamped to the first/last sample outside the range.
    pub fn rabi_at(&self, t: f64) -> RabiTriple {
        let s = &self.samples;
        let k = s.partition_point(|x| x.t <= t);
        if k == 0 {
            return s[0].rabi();
        }
        if k == s.len() {
            return s[k - 1].rabi();
        }
        let (a, b) = (&s[k - 1], &s[k]);
        let w = (t - a.t) / (b.t - a.t);
        let lerp = |x: f64, y: f64| x + (y - x) * w;
        RabiTriple::new(
            lerp(a.omega1, b.omega1),
            lerp(a.omega2, b.omega2),
            lerp(a.omega3, b.omega3),
        )
    }

    /// Largest `|Omega_i|` over all samples.
    pub fn peak_amplitude(&self) -> f64 {
        self.samples
            .iter()
            .flat_map(|s| [s.omega1.abs(), s.omega2.abs(), s.omega3.abs()])
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for s in &self.samples {
            wtr.serialize(s).map_err(|e| Error::Io(e.to_string()))?;
        }
        wtr.flush().map_err(|e| Error::Io(e.to_string()))
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(r);
        let headers = rdr.headers().map_err(|e| Error::Io(e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["t", "omega1", "omega2", "omega3"] {
            return Err(Error::Io(format!("unexpected CSV header {:?}", headers)));
        }
        let samples = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<ScheduleSample>, _>>()
            .map_err(|e| Error::Io(e.to_string()))?;
        Self::new(samples)
    }
}

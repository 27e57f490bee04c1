//! Piecewise-constant Pauli Hamiltonians.

use std::fmt;
use std::str::FromStr;

use crate::error::{QemError, Result};
use crate::quantum::{PauliString, PauliSum};

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub duration: f64,
    pub terms: Vec<(f64, PauliString)>,
}

impl Segment {
    pub fn hamiltonian(&self, n_qubits: usize) -> Result<PauliSum> {
        PauliSum::new(n_qubits, self.terms.clone())
    }
}

/// `K(t) = Σ_α J_α(t) P_α` with `J_α` constant on each segment.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    n_qubits: usize,
    segments: Vec<Segment>,
}

impl Schedule {
    pub fn new(n_qubits: usize, segments: Vec<Segment>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(QemError::InvalidArgument("schedule needs at least one qubit".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.duration > 0.0 && s.duration.is_finite()) {
                return Err(QemError::InvalidArgument(format!("segment {i} has duration {}", s.duration)));
            }
            for (w, p) in &s.terms {
                if p.n_qubits() != n_qubits {
                    return Err(QemError::DimensionMismatch { expected: n_qubits, found: p.n_qubits() });
                }
                if !w.is_finite() {
                    return Err(QemError::InvalidArgument(format!("segment {i} has coupling {w}")));
                }
            }
        }
        Ok(Self { n_qubits, segments })
    }

    /// A single segment with no Hamiltonian terms.
    pub fn idle(n_qubits: usize, duration: f64) -> Result<Self> {
        Self::new(n_qubits, vec![Segment { duration, terms: Vec::new() }])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_time(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }
}

/// Stretches time by `c` and divides every coupling by `c`.
pub fn rescale_schedule(s: &Schedule, c: f64) -> Result<Schedule> {
    if !(c >= 1.0 && c.is_finite()) {
        return Err(QemError::InvalidArgument(format!("rescaling factor {c} must be finite and at least 1")));
    }
    let segments = s
        .segments
        .iter()
        .map(|seg| Segment {
            duration: seg.duration * c,
            terms: seg.terms.iter().map(|(w, p)| (w / c, p.clone())).collect(),
        })
        .collect();
    Ok(Schedule { n_qubits: s.n_qubits, segments })
}

impl fmt::Display for Schedule {
    /// `qubits N`, then `segment <duration>` blocks of `term <coupling> <word>` lines.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n_qubits)?;
        for seg in &self.segments {
            writeln!(f, "segment {:?}", seg.duration)?;
            for (w, p) in &seg.terms {
                writeln!(f, "term {w:?} {p}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Schedule {
    type Err = QemError;

    fn from_str(text: &str) -> Result<Schedule> {
        let mut n_qubits = None;
        let mut segments: Vec<Segment> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| QemError::Parse { line: lineno + 1, msg: msg.to_string() };
            let mut tok = line.split_whitespace();
            match tok.next() {
                Some("qubits") => {
                    n_qubits = Some(tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| err("bad qubit count"))?);
                }
                Some("segment") => {
                    let duration = tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| err("bad duration"))?;
                    segments.push(Segment { duration, terms: Vec::new() });
                }
                Some("term") => {
                    let w: f64 = tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| err("bad coupling"))?;
                    let p: PauliString = tok.next().ok_or_else(|| err("missing Pauli word"))?.parse()?;
                    segments.last_mut().ok_or_else(|| err("term before any segment"))?.terms.push((w, p));
                }
                _ => return Err(err("expected `qubits`, `segment` or `term`")),
            }
        }
        Schedule::new(n_qubits.ok_or(QemError::Parse { line: 0, msg: "missing qubits header".into() })?, segments)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Schedule {
        Schedule::new(
            2,
            vec![
                Segment { duration: 2.0, terms: vec![(0.3, "XZ".parse().unwrap())] },
                Segment { duration: 0.1, terms: vec![(-1.0 / 3.0, "YI".parse().unwrap()), (1e-17, "ZZ".parse().unwrap())] },
            ],
        )
        .unwrap()
    }

    #[test]
    fn unit_rescale_is_identity() {
        let s = sample();
        assert_eq!(rescale_schedule(&s, 1.0).unwrap(), s);
    }

    #[test]
    fn rescale_by_two() {
        let s = Schedule::new(1, vec![Segment { duration: 2.0, terms: vec![(0.3, "X".parse().unwrap())] }]).unwrap();
        let r = rescale_schedule(&s, 2.0).unwrap();
        assert_eq!(r.segments()[0].duration, 4.0);
        assert_eq!(r.segments()[0].terms[0].0, 0.15);
        let back = rescale_schedule(&r, 1.0).unwrap();
        assert_eq!(back.total_time(), 2.0 * s.total_time());
    }

    #[test]
    fn rescale_below_one_is_rejected() {
        assert!(rescale_schedule(&sample(), 0.5).is_err());
        assert!(rescale_schedule(&sample(), f64::NAN).is_err());
    }

    #[test]
    fn text_round_trip_is_exact() {
        let s = sample();
        let back: Schedule = s.to_string().parse().unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn bad_segments_are_rejected() {
        assert!(Schedule::new(1, vec![Segment { duration: 0.0, terms: vec![] }]).is_err());
        assert!(Schedule::new(1, vec![Segment { duration: 1.0, terms: vec![(1.0, "XX".parse().unwrap())] }]).is_err());
    }
}

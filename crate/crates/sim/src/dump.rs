//! Plain-text instance dumps.
//!
//! ```text
//! n m
//! q_0 q_1 ... q_{m-1}
//! <n lines: each student's list, school ids in rank order>
//! <m lines: each school's strict priority order, student ids>
//! <m lines: each school's priority class per student, in student order>
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use schoolchoice_core::model::ModelError;
use schoolchoice_core::{Instance, PreferenceList, SchoolPriority, StudentId};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unexpected end of dump")]
    Truncated,
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn dump_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", inst.n(), inst.m());
    let _ = writeln!(out, "{}", join(inst.capacities()));
    for list in inst.true_prefs() {
        let _ = writeln!(out, "{}", join(list.iter().map(|s| s.0)));
    }
    for p in inst.priorities() {
        let _ = writeln!(out, "{}", join(p.strict_order().iter().map(|s| s.0)));
    }
    for p in inst.priorities() {
        let _ = writeln!(out, "{}", join(p.classes()));
    }
    out
}

/// Reads a dump back. Provenance is not part of the format.
pub fn parse_instance(text: &str) -> Result<Instance, DumpError> {
    let mut lines = text.lines().enumerate();
    let mut next_line = |expected: usize| -> Result<(usize, Vec<usize>), DumpError> {
        let (i, line) = lines.next().ok_or(DumpError::Truncated)?;
        let values = line
            .split_whitespace()
            .map(usize::from_str)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| DumpError::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
        if values.len() != expected {
            return Err(DumpError::Parse {
                line: i + 1,
                msg: format!("expected {expected} values, got {}", values.len()),
            });
        }
        Ok((i + 1, values))
    };
    let (_, header) = next_line(2)?;
    let (n, m) = (header[0], header[1]);
    let (_, capacities) = next_line(m)?;
    let prefs = (0..n)
        .map(|_| {
            let (_, ids) = next_line(m)?;
            Ok(PreferenceList::from_indices(&ids)?)
        })
        .collect::<Result<Vec<_>, DumpError>>()?;
    let orders = (0..m)
        .map(|_| next_line(n).map(|(_, ids)| ids))
        .collect::<Result<Vec<_>, _>>()?;
    let mut priorities = Vec::with_capacity(m);
    for order in orders {
        let (line, classes) = next_line(n)?;
        let classes = classes
            .into_iter()
            .map(|c| {
                u8::try_from(c).map_err(|e| DumpError::Parse {
                    line,
                    msg: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        priorities.push(SchoolPriority::new(
            classes,
            order.into_iter().map(StudentId).collect(),
        )?);
    }
    Ok(Instance::new(capacities, prefs, priorities)?)
}

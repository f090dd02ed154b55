//! Good–Macías sensitivity of Devaney-chaotic subshifts, surveyed over a
//! corpus. This gathers observations; nothing here is a proof.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probe::{gms_sensitivity_report, sft_horizon, Cover, SampleSpec, Status};
use crate::sft_decide;
use crate::systems::{SftSystem, System};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub id: String,
    pub devaney: bool,
    /// `None` when the system is not Devaney chaotic and was skipped.
    pub gms: Option<Status>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub rows: Vec<ProbeRow>,
    pub devaney: usize,
    pub holds: usize,
    pub fails: usize,
    pub inconclusive: usize,
    /// Devaney-chaotic systems where the cover search failed; worth a look.
    pub candidates: Vec<String>,
}

impl ProbeReport {
    pub fn table(&self) -> String {
        let mut out = String::from("id\tdevaney\tgms\n");
        for r in &self.rows {
            let gms = match r.gms {
                Some(Status::Holds) => "holds",
                Some(Status::Fails) => "FAILS (candidate)",
                Some(Status::Inconclusive) => "inconclusive",
                None => "skipped",
            };
            out.push_str(&format!("{}\t{}\t{}\n", r.id, r.devaney, gms));
        }
        out.push_str(&format!(
            "devaney chaotic: {}; gms holds: {}; fails: {}; inconclusive: {}\n",
            self.devaney, self.holds, self.fails, self.inconclusive
        ));
        out
    }
}

pub fn gms_probe(corpus: &[(String, SftSystem)]) -> Result<ProbeReport> {
    gms_probe_with(corpus, &SampleSpec::default())
}

/// Runs the length-1 cylinder cover search on every Devaney-chaotic system.
pub fn gms_probe_with(corpus: &[(String, SftSystem)], samples: &SampleSpec) -> Result<ProbeReport> {
    if corpus.is_empty() {
        return Err(Error::InvalidParameter("corpus is empty".into()));
    }
    let rows = corpus
        .iter()
        .map(|(id, s)| probe_row(id, s, samples))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(rows))
}

pub fn probe_row(id: &str, s: &SftSystem, samples: &SampleSpec) -> Result<ProbeRow> {
    let devaney = sft_decide::is_transitive_exact(s) && sft_decide::has_dense_periodic_points_exact(s) && !sft_decide::is_minimal_exact(s);
    let gms = if devaney {
        let sys = System::Sft(s.clone());
        Some(gms_sensitivity_report(&sys, &Cover::letters(s), samples, sft_horizon(s.alphabet_size()))?.status)
    } else {
        None
    };
    Ok(ProbeRow { id: id.to_string(), devaney, gms })
}

/// Aggregates rows; the counts do not depend on row order.
pub fn assemble(rows: Vec<ProbeRow>) -> ProbeReport {
    let count = |st: Status| rows.iter().filter(|r| r.gms == Some(st)).count();
    ProbeReport {
        devaney: rows.iter().filter(|r| r.devaney).count(),
        holds: count(Status::Holds),
        fails: count(Status::Fails),
        inconclusive: count(Status::Inconclusive),
        candidates: rows.iter().filter(|r| r.gms == Some(Status::Fails)).map(|r| r.id.clone()).collect(),
        rows,
    }
}

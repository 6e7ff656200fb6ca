//! Model-independent checks any classification service must pass.
//!
//! The suite assumes only that the service is deterministic: the same text
//! gets the same label whether sent alone or in a batch.

use std::time::Duration;

use serde::Serialize;

use super::remote::{RemoteClassifier, RemoteClassifierConfig};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

const PROBES: [&str; 6] = [
    "The ramp at the entrance was great.",
    "No wheelchair access at all, very disappointing.",
    "There is a handicap spot near the side door.",
    "Prices are accessible to everyone.",
    "",
    "Braille menus on request. Staff helped with the door!",
];

fn check(name: &'static str, r: std::result::Result<(), String>) -> Check {
    match r {
        Ok(()) => Check {
            name,
            passed: true,
            detail: String::new(),
        },
        Err(detail) => Check {
            name,
            passed: false,
            detail,
        },
    }
}

/// Runs every check against `endpoint`. Transport failures are reported as
/// failed checks, not errors.
pub fn run_conformance(endpoint: &str) -> Result<Vec<Check>> {
    let mut cfg = RemoteClassifierConfig::new(endpoint);
    cfg.retries = 0;
    cfg.timeout_ms = 10_000;
    let client = RemoteClassifier::new(cfg.clone())?;
    let mut out = Vec::new();

    out.push(check("health", {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(cfg.timeout_ms)))
            .http_status_as_error(false)
            .build()
            .into();
        match agent.get(&format!("{}/health", endpoint.trim_end_matches('/'))).call() {
            Ok(r) if r.status() == 200 => Ok(()),
            Ok(r) => Err(format!("status {}", r.status())),
            Err(e) => Err(e.to_string()),
        }
    }));

    out.push(check(
        "empty batch",
        match client.classify_batch(&[], 0) {
            Ok(l) if l.is_empty() => Ok(()),
            Ok(l) => Err(format!("{} labels for no texts", l.len())),
            Err(e) => Err(e.to_string()),
        },
    ));

    let batch = client.classify_batch(&PROBES, 0);
    out.push(check(
        "length and vocabulary",
        match &batch {
            Ok(l) if l.len() == PROBES.len() => Ok(()),
            Ok(l) => Err(format!("{} labels for {} texts", l.len(), PROBES.len())),
            Err(e) => Err(e.to_string()),
        },
    ));

    out.push(check("batch equals singles", {
        match &batch {
            Ok(labels) => PROBES
                .iter()
                .zip(labels)
                .enumerate()
                .try_for_each(|(i, (t, l))| match client.classify_batch(&[t], i) {
                    Ok(single) if single.as_slice() == [*l] => Ok(()),
                    Ok(single) => Err(format!("text {i}: batch {l}, alone {single:?}")),
                    Err(e) => Err(e.to_string()),
                }),
            Err(_) => Err("batch failed".into()),
        }
    }));

    out.push(check("order preserved", {
        let reversed: Vec<&str> = PROBES.iter().rev().copied().collect();
        match (&batch, client.classify_batch(&reversed, 0)) {
            (Ok(a), Ok(mut b)) => {
                b.reverse();
                if *a == b {
                    Ok(())
                } else {
                    Err(format!("forward {a:?}, reversed back {b:?}"))
                }
            }
            (_, Err(e)) => Err(e.to_string()),
            _ => Err("batch failed".into()),
        }
    }));

    out.push(check("chunked equals whole", {
        let mut small = cfg.clone();
        small.batch_size = 2;
        small.max_in_flight = 3;
        let texts: Vec<&str> = PROBES.iter().cycle().take(25).copied().collect();
        match (RemoteClassifier::new(small)?.classify_all(&texts), &batch) {
            (Ok(l), Ok(b)) => {
                let expect: Vec<_> = b.iter().cycle().take(25).copied().collect();
                if l == expect {
                    Ok(())
                } else {
                    Err("chunked labels differ".into())
                }
            }
            (Err(e), _) => Err(e.to_string()),
            _ => Err("batch failed".into()),
        }
    }));
    Ok(out)
}

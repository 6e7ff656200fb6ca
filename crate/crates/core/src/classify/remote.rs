//! Client for an external classification service.
//!
//! Wire protocol: `POST {endpoint}/classify` with `{"texts": [...]}`; the
//! reply is `{"labels": [...]}` of equal length and order, each label one of
//! the four lowercase attitude strings. Anything else is a protocol error.
//! Transport failures and 5xx replies are retried; once retries run out the
//! error names the input indices of the failed batch.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::annotation::AttitudeLabel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteClassifierConfig {
    pub endpoint: String,
    pub batch_size: usize,
    pub timeout_ms: u64,
    pub retries: u32,
    /// Batches allowed in flight at once.
    pub max_in_flight: usize,
}

impl RemoteClassifierConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        RemoteClassifierConfig {
            endpoint: endpoint.into(),
            batch_size: 32,
            timeout_ms: 30_000,
            retries: 2,
            max_in_flight: 4,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::invalid("remote batch size must be at least 1"));
        }
        if self.max_in_flight == 0 {
            return Err(Error::invalid("remote max_in_flight must be at least 1"));
        }
        Ok(())
    }

    fn url(&self) -> String {
        format!("{}/classify", self.endpoint.trim_end_matches('/'))
    }
}

#[derive(Serialize)]
struct ClassifyRequest<'a> {
    texts: &'a [&'a str],
}

#[derive(Deserialize)]
struct ClassifyResponse {
    labels: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RemoteClassifier {
    config: RemoteClassifierConfig,
    agent: ureq::Agent,
}

enum Attempt {
    Retryable(String),
    Fatal(Error),
}

impl RemoteClassifier {
    pub fn new(config: RemoteClassifierConfig) -> Result<Self> {
        config.validate()?;
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(RemoteClassifier { config, agent })
    }

    pub fn config(&self) -> &RemoteClassifierConfig {
        &self.config
    }

    fn attempt(&self, texts: &[&str]) -> std::result::Result<Vec<AttitudeLabel>, Attempt> {
        let body = serde_json::to_string(&ClassifyRequest { texts }).map_err(|e| Attempt::Fatal(e.into()))?;
        let mut resp = self
            .agent
            .post(&self.config.url())
            .header("Content-Type", "application/json")
            .send(body.as_str())
            .map_err(|e| Attempt::Retryable(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| Attempt::Retryable(e.to_string()))?;
        if status >= 500 {
            return Err(Attempt::Retryable(format!("status {status}")));
        }
        if status != 200 {
            return Err(Attempt::Fatal(Error::Protocol(format!("status {status}: {text}"))));
        }
        let parsed: ClassifyResponse = serde_json::from_str(&text)
            .map_err(|e| Attempt::Fatal(Error::Protocol(format!("malformed response body: {e}"))))?;
        if parsed.labels.len() != texts.len() {
            return Err(Attempt::Fatal(Error::Protocol(format!(
                "sent {} texts, received {} labels",
                texts.len(),
                parsed.labels.len()
            ))));
        }
        parsed
            .labels
            .iter()
            .map(|l| {
                l.parse::<AttitudeLabel>()
                    .map_err(|_| Attempt::Fatal(Error::Protocol(format!("unknown label `{l}`"))))
            })
            .collect()
    }

    /// Classifies one batch. `offset` is the index of `texts[0]` in the
    /// caller's input, used only for error reporting.
    pub fn classify_batch(&self, texts: &[&str], offset: usize) -> Result<Vec<AttitudeLabel>> {
        let mut last = String::new();
        for _ in 0..=self.config.retries {
            match self.attempt(texts) {
                Ok(labels) => return Ok(labels),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retryable(msg)) => last = msg,
            }
        }
        Err(Error::RemoteBatch {
            indices: (offset..offset + texts.len()).collect(),
            message: format!("gave up after {} attempts: {last}", self.config.retries + 1),
        })
    }

    /// Classifies all texts in `batch_size` chunks with up to
    /// `max_in_flight` requests outstanding. Output order matches input.
    pub fn classify_all(&self, texts: &[&str]) -> Result<Vec<AttitudeLabel>> {
        let batches: Vec<(usize, &[&str])> = texts
            .chunks(self.config.batch_size)
            .enumerate()
            .map(|(i, c)| (i * self.config.batch_size, c))
            .collect();
        let mut out = Vec::with_capacity(texts.len());
        for wave in batches.chunks(self.config.max_in_flight) {
            let results: Vec<Result<Vec<AttitudeLabel>>> = std::thread::scope(|scope| {
                let handles: Vec<_> = wave
                    .iter()
                    .map(|&(offset, chunk)| scope.spawn(move || self.classify_batch(chunk, offset)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("classifier thread panicked"))
                    .collect()
            });
            for r in results {
                out.extend(r?);
            }
        }
        Ok(out)
    }
}

/// One-shot convenience wrapper.
pub fn classify_remote(texts: &[&str], config: &RemoteClassifierConfig) -> Result<Vec<AttitudeLabel>> {
    RemoteClassifier::new(config.clone())?.classify_all(texts)
}

//! Blocking HTTP access with rate-limit backoff.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::FetchError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

pub trait Transport: Send + Sync {
    /// Performs a GET. `Err` means no HTTP response was obtained.
    fn get(&self, url: &str) -> Result<HttpResponse, String>;
}

pub struct UreqTransport {
    agent: ureq::Agent,
}

const MAX_BODY_BYTES: u64 = 512 * 1024 * 1024;

impl UreqTransport {
    pub fn new(timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .user_agent(concat!("ledgergraph/", env!("CARGO_PKG_VERSION")))
            .build()
            .into();
        Self { agent }
    }
}

impl Default for UreqTransport {
    fn default() -> Self {
        Self::new(Duration::from_secs(120))
    }
}

impl Transport for UreqTransport {
    fn get(&self, url: &str) -> Result<HttpResponse, String> {
        let mut resp = self.agent.get(url).call().map_err(|e| e.to_string())?;
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .with_config()
            .limit(MAX_BODY_BYTES)
            .read_to_string()
            .map_err(|e| e.to_string())?;
        Ok(HttpResponse { status, body })
    }
}

pub trait Sleeper: Send + Sync {
    fn sleep(&self, pause: Duration);
}

pub struct ThreadSleeper;

impl Sleeper for ThreadSleeper {
    fn sleep(&self, pause: Duration) {
        std::thread::sleep(pause);
    }
}

/// Records requested pauses instead of sleeping.
#[derive(Default)]
pub struct RecordingSleeper {
    pauses: Mutex<Vec<Duration>>,
}

impl RecordingSleeper {
    pub fn pauses(&self) -> Vec<Duration> {
        self.pauses.lock().unwrap().clone()
    }
}

impl Sleeper for RecordingSleeper {
    fn sleep(&self, pause: Duration) {
        self.pauses.lock().unwrap().push(pause);
    }
}

/// Pause schedule for repeated failures of one request: `initial`, doubled
/// per consecutive failure, capped at `max`, at most `max_retries` retries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackoffPolicy {
    pub initial: Duration,
    pub max: Duration,
    pub max_retries: u32,
}

impl Default for BackoffPolicy {
    fn default() -> Self {
        Self {
            initial: Duration::from_secs(5),
            max: Duration::from_secs(60),
            max_retries: 8,
        }
    }
}

impl BackoffPolicy {
    /// Pause before retry number `retry` (0-based).
    pub fn delay(&self, retry: u32) -> Duration {
        let factor = 1u32.checked_shl(retry).unwrap_or(u32::MAX);
        self.initial.saturating_mul(factor).min(self.max)
    }

    pub fn schedule(&self) -> Vec<Duration> {
        (0..self.max_retries).map(|r| self.delay(r)).collect()
    }
}

/// HTTP client shared by all fetch workers. Retry state lives on the stack
/// of each request, so every worker backs off independently.
#[derive(Clone)]
pub struct ApiClient {
    transport: Arc<dyn Transport>,
    sleeper: Arc<dyn Sleeper>,
    policy: BackoffPolicy,
    pauses: Arc<AtomicU64>,
    requests: Arc<AtomicU64>,
}

impl ApiClient {
    pub fn new(transport: Arc<dyn Transport>, sleeper: Arc<dyn Sleeper>, policy: BackoffPolicy) -> Self {
        Self {
            transport,
            sleeper,
            policy,
            pauses: Arc::new(AtomicU64::new(0)),
            requests: Arc::new(AtomicU64::new(0)),
        }
    }

    pub fn policy(&self) -> BackoffPolicy {
        self.policy
    }

    pub fn backoff_pauses(&self) -> u64 {
        self.pauses.load(Ordering::Relaxed)
    }

    pub fn request_count(&self) -> u64 {
        self.requests.load(Ordering::Relaxed)
    }

    pub fn get_text(&self, url: &str) -> Result<String, FetchError> {
        let mut retry = 0u32;
        loop {
            self.requests.fetch_add(1, Ordering::Relaxed);
            let failure = match self.transport.get(url) {
                Ok(resp) if (200..300).contains(&resp.status) => return Ok(resp.body),
                Ok(resp) if resp.status == 429 => {
                    if retry >= self.policy.max_retries {
                        return Err(FetchError::RateLimited {
                            url: url.to_owned(),
                            attempts: retry + 1,
                        });
                    }
                    format!("HTTP 429 from {url}")
                }
                Ok(resp) if resp.status >= 500 => {
                    if retry >= self.policy.max_retries {
                        return Err(FetchError::Http {
                            url: url.to_owned(),
                            status: resp.status,
                        });
                    }
                    format!("HTTP {} from {url}", resp.status)
                }
                Ok(resp) => {
                    return Err(FetchError::Http {
                        url: url.to_owned(),
                        status: resp.status,
                    })
                }
                Err(message) => {
                    if retry >= self.policy.max_retries {
                        return Err(FetchError::Unreachable {
                            url: url.to_owned(),
                            attempts: retry + 1,
                            message,
                        });
                    }
                    message
                }
            };
            let pause = self.policy.delay(retry);
            log::warn!("{failure}; pausing {}s before retrying", pause.as_secs_f64());
            self.pauses.fetch_add(1, Ordering::Relaxed);
            self.sleeper.sleep(pause);
            retry += 1;
        }
    }

    pub fn get_json(&self, url: &str) -> Result<serde_json::Value, FetchError> {
        let body = self.get_text(url)?;
        serde_json::from_str(&body).map_err(|e| FetchError::Payload {
            url: url.to_owned(),
            message: e.to_string(),
        })
    }
}

//! Minimal in-process HTTP server speaking the classification wire protocol.
//!
//! It exists so the remote client can be exercised without any external
//! service: tests spawn it on an ephemeral port, point a
//! [`RemoteClassifierConfig`](super::RemoteClassifierConfig) at it, and drop
//! it when done. It also answers `GET /health`.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use serde_json::json;

/// What the stub sends back for one request.
#[derive(Debug, Clone, PartialEq)]
pub enum StubReply {
    /// 200 with `{"labels": [...]}`; strings are sent verbatim.
    Labels(Vec<String>),
    /// Arbitrary status with a raw body.
    Raw(u16, String),
}

type Rule = dyn Fn(usize, &[String]) -> StubReply + Send + Sync;

pub struct StubServer {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    requests: Arc<AtomicUsize>,
    handle: Option<JoinHandle<()>>,
}

impl StubServer {
    /// Serves on `127.0.0.1` with an OS-assigned port. `rule` receives the
    /// zero-based request number and the texts of that request.
    pub fn spawn<F>(rule: F) -> std::io::Result<Self>
    where
        F: Fn(usize, &[String]) -> StubReply + Send + Sync + 'static,
    {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        let addr = listener.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let requests = Arc::new(AtomicUsize::new(0));
        let rule: Arc<Rule> = Arc::new(rule);
        let handle = {
            let stop = stop.clone();
            let requests = requests.clone();
            std::thread::spawn(move || {
                for conn in listener.incoming() {
                    if stop.load(Ordering::SeqCst) {
                        break;
                    }
                    let Ok(stream) = conn else { continue };
                    let rule = rule.clone();
                    let requests = requests.clone();
                    std::thread::spawn(move || {
                        let _ = serve_one(stream, &*rule, &requests);
                    });
                }
            })
        };
        Ok(StubServer {
            addr,
            stop,
            requests,
            handle: Some(handle),
        })
    }

    /// Replies to every text with a fixed label string.
    pub fn constant(label: &str) -> std::io::Result<Self> {
        let label = label.to_string();
        Self::spawn(move |_, texts| StubReply::Labels(vec![label.clone(); texts.len()]))
    }

    /// Applies a per-text rule.
    pub fn per_text<F>(f: F) -> std::io::Result<Self>
    where
        F: Fn(&str) -> String + Send + Sync + 'static,
    {
        Self::spawn(move |_, texts| StubReply::Labels(texts.iter().map(|t| f(t)).collect()))
    }

    pub fn endpoint(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn requests_served(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        // wake the accept loop
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

fn serve_one(stream: TcpStream, rule: &Rule, counter: &AtomicUsize) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut request_line = String::new();
    if reader.read_line(&mut request_line)? == 0 {
        return Ok(());
    }
    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 || line == "\r\n" || line == "\n" {
            break;
        }
        if let Some((name, value)) = line.split_once(':') {
            if name.trim().eq_ignore_ascii_case("content-length") {
                content_length = value.trim().parse().unwrap_or(0);
            }
        }
    }
    let mut body = vec![0u8; content_length];
    reader.read_exact(&mut body)?;

    let mut parts = request_line.split_whitespace();
    let method = parts.next().unwrap_or("");
    let path = parts.next().unwrap_or("");
    let (status, payload) = match (method, path) {
        ("GET", "/health") => (200, json!({"status": "ready"}).to_string()),
        ("POST", "/classify") => {
            let n = counter.fetch_add(1, Ordering::SeqCst);
            match serde_json::from_slice::<serde_json::Value>(&body)
                .ok()
                .and_then(|v| serde_json::from_value::<Vec<String>>(v.get("texts")?.clone()).ok())
            {
                Some(texts) => match rule(n, &texts) {
                    StubReply::Labels(labels) => (200, json!({ "labels": labels }).to_string()),
                    StubReply::Raw(code, body) => (code, body),
                },
                None => (400, json!({"error": "body must be {\"texts\": [...]}"}).to_string()),
            }
        }
        _ => (404, json!({"error": "not found"}).to_string()),
    };
    let mut stream = stream;
    write!(
        stream,
        "HTTP/1.1 {status} {}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
        reason(status),
        payload.len()
    )?;
    stream.flush()
}

fn reason(status: u16) -> &'static str {
    match status {
        200 => "OK",
        400 => "Bad Request",
        404 => "Not Found",
        413 => "Payload Too Large",
        500 => "Internal Server Error",
        503 => "Service Unavailable",
        _ => "Status",
    }
}

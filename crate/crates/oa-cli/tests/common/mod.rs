#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Child, Command, Stdio};
use std::time::Duration;

pub const OASTORE_VARS: [&str; 7] = [
    "OASTORE_BIND",
    "OASTORE_BASE_URI",
    "OASTORE_STORE",
    "OASTORE_MAX_BODY_BYTES",
    "OASTORE_OA_NS",
    "OASTORE_GRAPH_TYPE_IRI",
    "OASTORE_CONTEXT_IRI",
];

/// The `annotate` binary with a clean `OASTORE_*` environment.
pub fn command() -> Command {
    let mut command = Command::new(env!("CARGO_BIN_EXE_annotate"));
    for var in OASTORE_VARS {
        command.env_remove(var);
    }
    command
}

/// An `annotate serve` child on an ephemeral port; killed on drop.
pub struct ServerProcess {
    child: Child,
    pub url: String,
}

impl ServerProcess {
    pub fn start(dir: &Path, extra_env: &[(&str, &str)]) -> ServerProcess {
        let mut command = command();
        command
            .args([
                "serve",
                "--bind",
                "127.0.0.1:0",
                "--base-uri",
                "http://ids.example",
                "--store",
            ])
            .arg(dir.join("store"))
            .stdout(Stdio::null())
            .stderr(Stdio::piped());
        for (key, value) in extra_env {
            command.env(key, value);
        }
        let mut child = command.spawn().expect("serve starts");

        let stderr = child.stderr.take().expect("stderr piped");
        let (send, recv) = std::sync::mpsc::channel();
        std::thread::spawn(move || {
            let mut line = String::new();
            let _ = BufReader::new(stderr).read_line(&mut line);
            let _ = send.send(line);
        });
        let line = recv
            .recv_timeout(Duration::from_secs(10))
            .expect("serve announces its address");
        let url = line
            .trim()
            .strip_prefix("listening on ")
            .unwrap_or_else(|| panic!("unexpected serve output: {line:?}"))
            .to_string();
        ServerProcess { child, url }
    }
}

impl Drop for ServerProcess {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

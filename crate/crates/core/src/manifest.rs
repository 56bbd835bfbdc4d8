//! Run manifests: what was run, on which inputs, producing which files.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        let _ = write!(s, "{b:02x}");
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileDigest {
    /// `graph`, `packing`, ... for inputs; the file name for outputs.
    pub role: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    /// Sorted by key.
    pub params: Vec<(String, String)>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            params: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.params.binary_search_by(|(k, _)| k.as_str().cmp(key)) {
            Ok(i) => self.params[i].1 = value,
            Err(i) => self.params.insert(i, (key.to_string(), value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn input(&mut self, role: &str, path: &str, bytes: &[u8]) {
        self.inputs.push(FileDigest {
            role: role.to_string(),
            path: path.to_string(),
            sha256: sha256_hex(bytes),
        });
    }

    pub fn output(&mut self, name: &str, bytes: &[u8]) {
        self.outputs.push(FileDigest {
            role: name.to_string(),
            path: name.to_string(),
            sha256: sha256_hex(bytes),
        });
    }

    /// Digest of the tool version, command, parameters and input contents.
    /// Paths and outputs do not enter, so reruns elsewhere share the hash.
    pub fn run_hash(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.tool_version, self.command);
        for (k, v) in &self.params {
            let _ = writeln!(s, "param {k}={v}");
        }
        for i in &self.inputs {
            let _ = writeln!(s, "input {} {}", i.role, i.sha256);
        }
        sha256_hex(s.as_bytes())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "snowlab-manifest");
        let _ = writeln!(s, "tool_version {}", self.tool_version);
        let _ = writeln!(s, "command {}", self.command);
        for (k, v) in &self.params {
            let _ = writeln!(s, "param {k} {v}");
        }
        for i in &self.inputs {
            let _ = writeln!(s, "input {} {} {}", i.role, i.sha256, i.path);
        }
        for o in &self.outputs {
            let _ = writeln!(s, "output {} {}", o.sha256, o.path);
        }
        let _ = writeln!(s, "run_hash {}", self.run_hash());
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, "snowlab-manifest")) => {}
            _ => return Err(Error::parse(1, "not a snowlab manifest")),
        }
        let mut m = RunManifest::new("");
        let mut recorded_hash = None;
        for (i, line) in lines {
            let bad = || Error::parse(i + 1, format!("malformed manifest line {line:?}"));
            let (key, rest) = line.split_once(' ').ok_or_else(bad)?;
            match key {
                "tool_version" => m.tool_version = rest.to_string(),
                "command" => m.command = rest.to_string(),
                "param" => {
                    let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
                    m.param(k, v);
                }
                "input" => {
                    let mut parts = rest.splitn(3, ' ');
                    let (role, sha, path) = (parts.next(), parts.next(), parts.next());
                    let (Some(role), Some(sha), Some(path)) = (role, sha, path) else {
                        return Err(bad());
                    };
                    m.inputs.push(FileDigest {
                        role: role.into(),
                        path: path.into(),
                        sha256: sha.into(),
                    });
                }
                "output" => {
                    let (sha, path) = rest.split_once(' ').ok_or_else(bad)?;
                    m.outputs.push(FileDigest {
                        role: path.into(),
                        path: path.into(),
                        sha256: sha.into(),
                    });
                }
                "run_hash" => recorded_hash = Some(rest.to_string()),
                _ => return Err(bad()),
            }
        }
        if recorded_hash.as_deref() != Some(m.run_hash().as_str()) {
            return Err(Error::invalid("manifest run hash does not match its contents"));
        }
        Ok(m)
    }
}

//! Run manifest: what was run, on which bytes, producing which bytes.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Default)]
pub struct RunManifest {
    pub command: String,
    pub params: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub version: String,
    /// `(label, sha256)` of every file read.
    pub inputs: Vec<(String, String)>,
    /// `(label, sha256)` of stdout and every file written.
    pub outputs: Vec<(String, String)>,
    pub wall_ms: f64,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            ..Default::default()
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.params.push((key.into(), value.to_string()));
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command={}", self.command);
        for (k, v) in &self.params {
            let _ = writeln!(out, "param.{k}={v}");
        }
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed={seed}");
        }
        let _ = writeln!(out, "version={}", self.version);
        for (label, digest) in &self.inputs {
            let _ = writeln!(out, "input.{label}.sha256={digest}");
        }
        for (label, digest) in &self.outputs {
            let _ = writeln!(out, "output.{label}.sha256={digest}");
        }
        let _ = writeln!(out, "wall_ms={:.3}", self.wall_ms);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_and_layout() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        let mut m = RunManifest::new("lp");
        m.param("k", 4);
        m.seed = Some(7);
        let text = m.to_text();
        assert!(text.starts_with("command=lp\nparam.k=4\nseed=7\nversion="));
        assert!(text.ends_with("wall_ms=0.000\n"));
    }
}
